#include "freent/microstates.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "freent/eigen.hpp"
#include "freent/errors.hpp"

namespace freent {

void validate(const MicrostateSpec& spec) {
    if (spec.n < 1) throw ValidationError("microstate spec: n must be >= 1");
    if (spec.k < 1) throw ValidationError("microstate spec: k must be >= 1");
    if (!(spec.epsilon > 0.0)) throw ValidationError("microstate spec: epsilon must be > 0");
    if (!(spec.radius_bound > 0.0))
        throw ValidationError("microstate spec: radius bound must be > 0");
    for (const auto& c : spec.constraints) {
        if (c.poly.arity() != spec.arity())
            throw ValidationError("microstate spec: constraint arity mismatch");
        if (!(c.target >= 0.0))
            throw ValidationError("microstate spec: norm target must be >= 0");
    }
}

MicrostateSpec make_spec(std::size_t n, std::size_t m, std::size_t k, double epsilon,
                         const std::vector<double>& coordinate_targets,
                         const std::vector<Constraint>& extra) {
    if (coordinate_targets.size() != n + m)
        throw ValidationError("make_spec: need one coordinate target per generator");
    MicrostateSpec spec;
    spec.n = n;
    spec.m = m;
    spec.k = k;
    spec.epsilon = epsilon;
    double mx = 0.0;
    for (std::size_t j = 0; j < n + m; ++j) {
        spec.constraints.push_back(
            {NCPolynomial::coordinate(n + m, j + 1), coordinate_targets[j]});
        mx = std::max(mx, coordinate_targets[j]);
    }
    for (const auto& c : extra) spec.constraints.push_back(c);
    spec.radius_bound = mx + 2.0 * epsilon;
    validate(spec);
    return spec;
}

MicrostateSpec spec_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("microstate spec: malformed JSON");
    if (!j.is_object()) throw ValidationError("microstate spec: expected an object");
    for (const char* key : {"n", "m", "k", "epsilon", "M", "constraints"})
        if (!j.contains(key))
            throw ValidationError(std::string("microstate spec: missing field '") + key + "'");
    MicrostateSpec spec;
    if (!j["n"].is_number_unsigned() || !j["m"].is_number_unsigned() ||
        !j["k"].is_number_unsigned())
        throw ValidationError("microstate spec: n, m, k must be non-negative integers");
    spec.n = j["n"].get<std::size_t>();
    spec.m = j["m"].get<std::size_t>();
    spec.k = j["k"].get<std::size_t>();
    if (!j["epsilon"].is_number() || !j["M"].is_number())
        throw ValidationError("microstate spec: epsilon and M must be numbers");
    spec.epsilon = j["epsilon"].get<double>();
    spec.radius_bound = j["M"].get<double>();
    if (!j["constraints"].is_array())
        throw ValidationError("microstate spec: constraints must be an array");
    for (const auto& cj : j["constraints"]) {
        if (!cj.is_object() || !cj.contains("poly") || !cj.contains("target") ||
            !cj["poly"].is_string() || !cj["target"].is_number())
            throw ValidationError("microstate spec: each constraint needs a poly string "
                                  "and a numeric target");
        spec.constraints.push_back(
            {NCPolynomial::parse(cj["poly"].get<std::string>(), spec.n + spec.m),
             cj["target"].get<double>()});
    }
    validate(spec);
    return spec;
}

std::string spec_to_json_text(const MicrostateSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["k"] = spec.k;
    j["epsilon"] = spec.epsilon;
    j["M"] = spec.radius_bound;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : spec.constraints)
        cs.push_back({{"poly", c.poly.to_string()}, {"target", c.target}});
    j["constraints"] = std::move(cs);
    return j.dump();
}

MicrostateSpec with_dimension(const MicrostateSpec& spec, std::size_t k) {
    MicrostateSpec out = spec;
    out.k = k;
    validate(out);
    return out;
}

MicrostateSpec restrict_to_presence(const MicrostateSpec& spec) {
    validate(spec);
    MicrostateSpec out;
    out.n = spec.n;
    out.m = 0;
    out.k = spec.k;
    out.epsilon = spec.epsilon;
    out.radius_bound = spec.radius_bound;
    for (const auto& c : spec.constraints) {
        bool presence_only = true;
        for (const auto& [w, coeff] : c.poly.terms())
            for (auto v : w)
                if (v >= spec.n) presence_only = false;
        if (!presence_only) continue;
        NCPolynomial q = NCPolynomial::constant(spec.n, 0.0);
        for (const auto& [w, coeff] : c.poly.terms()) {
            NCPolynomial word_poly = NCPolynomial::constant(spec.n, coeff);
            for (auto v : w) word_poly = word_poly * NCPolynomial::coordinate(spec.n, v + 1);
            q = q + word_poly;
        }
        out.constraints.push_back({q, c.target});
    }
    return out;
}

namespace {

bool check_constraints(const MicrostateSpec& spec, const MatrixTuple& t, bool two_sided) {
    validate(spec);
    if (t.arity() != spec.arity())
        throw ValidationError("microstate check: tuple arity mismatch");
    if (t.dim() != spec.k)
        throw ValidationError("microstate check: tuple dimension mismatch");
    for (const auto& c : spec.constraints) {
        const double nrm = poly_norm_at(c.poly, t);
        if (two_sided) {
            if (std::abs(nrm - c.target) > spec.epsilon) return false;
        } else {
            if (nrm > c.target + spec.epsilon) return false;
        }
    }
    return true;
}

} // namespace

bool is_microstate(const MicrostateSpec& spec, const MatrixTuple& t) {
    return check_constraints(spec, t, true);
}

bool is_semi_microstate(const MicrostateSpec& spec, const MatrixTuple& t) {
    return check_constraints(spec, t, false);
}

MatrixTuple project_presence(const MatrixTuple& t, std::size_t n) {
    if (n < 1 || n > t.arity())
        throw ValidationError("project_presence: n out of range");
    std::vector<HermitianMatrix> mats(t.mats.begin(), t.mats.begin() + std::ptrdiff_t(n));
    return MatrixTuple(std::move(mats));
}

MatrixTuple direct_sum(const MatrixTuple& a, const MatrixTuple& b) {
    if (a.arity() != b.arity()) throw ValidationError("direct_sum: arity mismatch");
    const std::size_t ka = a.dim(), kb = b.dim(), k = ka + kb;
    std::vector<HermitianMatrix> mats;
    mats.reserve(a.arity());
    for (std::size_t j = 0; j < a.arity(); ++j) {
        CMat m(k);
        for (std::size_t i = 0; i < ka; ++i)
            for (std::size_t l = 0; l < ka; ++l) {
                m.re[i * k + l] = a[j].re()[i * ka + l];
                m.im[i * k + l] = a[j].im()[i * ka + l];
            }
        for (std::size_t i = 0; i < kb; ++i)
            for (std::size_t l = 0; l < kb; ++l) {
                m.re[(ka + i) * k + (ka + l)] = b[j].re()[i * kb + l];
                m.im[(ka + i) * k + (ka + l)] = b[j].im()[i * kb + l];
            }
        mats.emplace_back(m);
    }
    return MatrixTuple(std::move(mats));
}

void validate(const TraceSpec& spec) {
    if (spec.arity < 1) throw ValidationError("trace spec: arity must be >= 1");
    if (!(spec.tol > 0.0)) throw ValidationError("trace spec: tol must be > 0");
    if (!(spec.radius_bound > 0.0))
        throw ValidationError("trace spec: radius bound must be > 0");
    for (const auto& [w, v] : spec.moments) {
        if (w.empty()) throw ValidationError("trace spec: the empty word is not a moment");
        for (auto idx : w)
            if (idx >= spec.arity)
                throw ValidationError("trace spec: word uses a variable outside the arity");
    }
}

std::complex<double> word_trace(const MatrixTuple& t, const Word& w) {
    if (w.empty()) return {1.0, 0.0};
    for (auto idx : w)
        if (idx >= t.arity()) throw ValidationError("word_trace: variable out of range");
    const std::size_t k = t.dim();
    CMat prod = t[w[0]].to_cmat();
    for (std::size_t l = 1; l < w.size(); ++l) prod = cmul(prod, t[w[l]].to_cmat());
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        re += prod.re[i * k + i];
        im += prod.im[i * k + i];
    }
    return {re / double(k), im / double(k)};
}

bool is_trace_microstate(const TraceSpec& spec, const MatrixTuple& t) {
    validate(spec);
    if (t.arity() != spec.arity)
        throw ValidationError("trace microstate check: tuple arity mismatch");
    for (std::size_t j = 0; j < t.arity(); ++j)
        if (opnorm(t[j]) > spec.radius_bound) return false;
    for (const auto& [w, target] : spec.moments)
        if (std::abs(word_trace(t, w) - std::complex<double>(target, 0.0)) > spec.tol)
            return false;
    return true;
}

double tracestate_metric(const TraceSpec& a, const TraceSpec& b, std::size_t p_max) {
    validate(a);
    validate(b);
    if (a.arity != b.arity) throw ValidationError("tracestate_metric: arity mismatch");
    if (p_max < 1) throw ValidationError("tracestate_metric: p_max must be >= 1");
    const double d = double(a.arity);
    const double M = std::max(a.radius_bound, b.radius_bound);
    const double base = 2.0 * M * d;

    std::map<Word, double> diff;
    for (const auto& [w, v] : a.moments) diff[w] += v;
    for (const auto& [w, v] : b.moments) diff[w] -= v;

    double total = 0.0;
    for (const auto& [w, delta] : diff) {
        if (w.size() > p_max) continue;
        total += std::abs(delta) * std::pow(base, -double(w.size()));
    }
    return total;
}

} // namespace freent
