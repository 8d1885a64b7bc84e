#include "freent/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "freent/eigen.hpp"
#include "freent/entropy.hpp"
#include "freent/errors.hpp"
#include "freent/kernels.hpp"
#include "freent/microstates.hpp"
#include "freent/ncpoly.hpp"
#include "freent/parallel.hpp"
#include "freent/potential.hpp"
#include "freent/randmat.hpp"
#include "freent_schemas.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace freent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Text form for CSV cells: shortest round-trip decimals, literal inf / nan.
std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

// JSON cannot hold non-finite numbers, so those become strings.
json jreal(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

struct Csv {
    std::string text;
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += ',';
            text += cells[i];
        }
        text += '\n';
    }
};

// Schema validation admits integral floats (a config file may say 1e5), so
// integer extraction has to as well.
std::uint64_t as_u64(const json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const long long x = v.get<long long>();
        if (x < 0) throw ValidationError("expected a nonnegative integer");
        return std::uint64_t(x);
    }
    const double d = v.get<double>();
    if (!(d >= 0) || d != std::trunc(d))
        throw ValidationError("expected a nonnegative integer");
    return std::uint64_t(d);
}

std::size_t as_size(const json& v) { return std::size_t(as_u64(v)); }

std::vector<std::size_t> as_size_vec(const json& v) {
    std::vector<std::size_t> out;
    for (const auto& e : v) out.push_back(as_size(e));
    return out;
}

using FileList = std::vector<std::pair<std::string, std::string>>;

double parse_number(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ValidationError(what + ": cannot parse number '" + s + "'");
    return v;
}

std::vector<std::pair<double, double>> parse_interval_list(const std::string& s) {
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0;
    auto skip_fill = [&] {
        while (i < s.size() &&
               (s[i] == ' ' || s[i] == '\t' || s[i] == ';' || s[i] == ','))
            ++i;
    };
    auto read_number = [&](const char* side) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
        if (ec != std::errc())
            throw ValidationError(std::string("intervals: expected the ") + side +
                                  " endpoint at position " + std::to_string(i));
        i = std::size_t(p - s.data());
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        return v;
    };
    while (true) {
        skip_fill();
        if (i == s.size()) break;
        if (s[i] != '[')
            throw ValidationError("intervals: expected '[' at position " + std::to_string(i));
        ++i;
        const double a = read_number("left");
        if (i == s.size() || s[i] != ',')
            throw ValidationError("intervals: expected ',' at position " + std::to_string(i));
        ++i;
        const double b = read_number("right");
        if (i == s.size() || s[i] != ']')
            throw ValidationError("intervals: expected ']' at position " + std::to_string(i));
        ++i;
        out.emplace_back(a, b);
    }
    if (out.empty())
        throw ValidationError("intervals: expected at least one interval like [-1,1]");
    return out;
}

struct PresetParsed {
    enum Kind { semicircular, interval, vacuous } kind = semicircular;
    double a = 0.0, b = 0.0;  // interval endpoints
};

PresetParsed parse_preset(const std::string& s) {
    PresetParsed p;
    if (s == "semicircular") return p;
    if (s == "vacuous") {
        p.kind = PresetParsed::vacuous;
        return p;
    }
    if (s.rfind("interval:", 0) == 0) {
        const std::string rest = s.substr(9);
        const std::size_t comma = rest.find(',');
        if (comma == std::string::npos)
            throw ValidationError("preset: interval form is interval:a,b");
        p.kind = PresetParsed::interval;
        p.a = parse_number(rest.substr(0, comma), "preset");
        p.b = parse_number(rest.substr(comma + 1), "preset");
        if (!(p.a < p.b)) throw ValidationError("preset: interval needs a < b");
        return p;
    }
    throw ValidationError("unknown preset '" + s +
                          "' (expected semicircular, vacuous, or interval:a,b)");
}

// Builds the constraint spec a command acts on: an inline spec object wins,
// otherwise the preset family at the configured matrix size.
MicrostateSpec resolve_spec(const json& p) {
    const std::size_t k = as_size(p.at("k"));
    if (p.contains("spec")) {
        MicrostateSpec spec = spec_from_json_text(p.at("spec").dump());
        if (spec.k != k) spec = with_dimension(spec, k);
        return spec;
    }
    const PresetParsed preset = parse_preset(p.value("preset", "semicircular"));
    switch (preset.kind) {
        case PresetParsed::semicircular:
            return semicircular_spec(as_size(p.at("n")), k,
                                     p.at("eps").get<double>());
        case PresetParsed::vacuous:
            return vacuous_spec(as_size(p.at("n")), k);
        case PresetParsed::interval:
            return interval_spec(preset.a, preset.b, k, p.at("eps").get<double>(),
                                 as_size(p.at("degree")));
    }
    throw ValidationError("preset: unreachable");
}

Metric parse_metric(const std::string& s) {
    if (s == "uniform") return Metric::uniform;
    if (s == "hs") return Metric::hs;
    throw ValidationError("metric must be 'uniform' or 'hs'");
}

json spec_as_json(const MicrostateSpec& spec) {
    return json::parse(spec_to_json_text(spec));
}

// ---- command runners ------------------------------------------------------

void run_equilibrium_family(const json& p, bool capacity_view, json& out,
                            std::vector<std::string>& warnings, FileList& files) {
    const RealCompact K = RealCompact::make(parse_interval_list(p.at("intervals")));
    const std::size_t grid = as_size(p.at("grid"));

    if (!K.has_interior()) {
        out["capacity"] = 0.0;
        out["robin"] = jreal(-kInf);
        out["chi"] = jreal(-kInf);
        out["kappa"] = jreal(-kInf);
        Csv c;
        c.line({"capacity", "robin", "chi", "kappa"});
        c.line({"0", "-inf", "-inf", "-inf"});
        files.emplace_back("data/capacity.csv", c.text);
        warnings.push_back("input has no interval part; capacity is 0");
        return;
    }

    const EquilibriumResult eq = equilibrium_measure(K, grid);
    const double cap = std::exp(eq.robin);
    const double chi = chi_one_var(eq.measure);
    const double kap = eq.robin + theta();

    out["capacity"] = cap;
    out["robin"] = eq.robin;
    out["chi"] = chi;
    out["kappa"] = kap;
    out["fw_gap"] = eq.fw_gap;
    out["iterations"] = eq.iterations;
    out["potential_spread"] = eq.potential_spread;
    out["polished"] = eq.polished;
    std::size_t support = 0;
    for (double w : eq.measure.weights)
        if (w > 0.0) ++support;
    out["support_size"] = support;

    if (capacity_view) {
        Csv c;
        c.line({"capacity", "robin", "chi", "kappa"});
        c.line({fmt(cap), fmt(eq.robin), fmt(chi), fmt(kap)});
        files.emplace_back("data/capacity.csv", c.text);
    }
    Csv m;
    m.line({"x", "weight"});
    for (std::size_t i = 0; i < eq.measure.points.size(); ++i)
        m.line({fmt(eq.measure.points[i]), fmt(eq.measure.weights[i])});
    files.emplace_back("data/measure.csv", m.text);

    if (eq.potential_spread > 5e-3)
        warnings.push_back("equilibrium potential spread " + fmt(eq.potential_spread) +
                           " exceeds the 5e-3 target");
}

// Shared by gue-norms (implicit P = X1) and ht-check (arbitrary P).
void run_norm_scan(const json& p, const NCPolynomial& poly, std::size_t arity,
                   double target, json& out, std::vector<std::string>& warnings,
                   FileList& files) {
    const auto dims = as_size_vec(p.at("dims"));
    const std::size_t trials = as_size(p.at("trials"));
    const std::size_t workers = as_size(p.at("workers"));
    const std::uint64_t seed = as_u64(p.at("seed"));

    std::vector<double> norms(dims.size() * trials, 0.0);
    parallel_over(norms.size(), workers, [&](std::size_t i) {
        const std::size_t d = i / trials;
        const MatrixTuple t = sample_gue(dims[d], arity, seed, i);
        norms[i] = poly_norm_at(poly, t);
    });

    Csv raw;
    raw.line({"k", "trial", "norm"});
    Csv summary;
    summary.line({"k", "mean", "sd", "target", "abs_error", "gue_edge_reference"});
    json per_dim = json::array();
    for (std::size_t d = 0; d < dims.size(); ++d) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const double v = norms[d * trials + t];
            raw.line({std::to_string(dims[d]), std::to_string(t), fmt(v)});
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / double(trials);
        double sd = 0.0;
        if (trials > 1)
            sd = std::sqrt(std::max(0.0, (sumsq - sum * sum / double(trials)) /
                                             double(trials - 1)));
        const double err = std::abs(mean - target);
        // Finite-size edge location of a single GUE matrix; informative for
        // the one-matrix scan only.
        const double edge = 2.0 - 1.77 * std::pow(double(dims[d]), -2.0 / 3.0);
        summary.line({std::to_string(dims[d]), fmt(mean), fmt(sd), fmt(target),
                      fmt(err), fmt(edge)});
        per_dim.push_back({{"k", dims[d]},
                           {"mean", mean},
                           {"sd", sd},
                           {"abs_error", jreal(err)}});
    }
    files.emplace_back("data/norms.csv", raw.text);
    files.emplace_back("data/summary.csv", summary.text);
    out["dims"] = per_dim;
    out["target"] = jreal(target);
    out["trials"] = trials;
    if (std::isnan(target))
        warnings.push_back(
            "no closed-form norm for this polynomial; target column is nan");
}

void run_gue_norms(const json& p, json& out, std::vector<std::string>& warnings,
                   FileList& files) {
    run_norm_scan(p, NCPolynomial::coordinate(1, 1), 1, 2.0, out, warnings, files);
}

void run_ht_check(const json& p, json& out, std::vector<std::string>& warnings,
                  FileList& files) {
    const std::size_t n = as_size(p.at("n"));
    const NCPolynomial poly = NCPolynomial::parse(p.at("poly"), n);

    // Closed-form limits exist for real linear combinations only.
    std::vector<double> coeffs(n, 0.0);
    bool linear = !poly.is_zero();
    for (const auto& [w, c] : poly.terms()) {
        if (w.size() != 1 || c.imag() != 0.0) {
            linear = false;
            break;
        }
        coeffs[w[0]] = c.real();
    }
    const double target =
        linear ? semicircular_linear_norm(coeffs) : std::numeric_limits<double>::quiet_NaN();

    out["poly"] = poly.to_string();
    run_norm_scan(p, poly, n, target, out, warnings, files);
}

void run_gamma_measure(const json& p, json& out, std::vector<std::string>& warnings,
                       FileList& files) {
    const MicrostateSpec spec = resolve_spec(p);
    const AcceptanceEstimate est = estimate_gamma_measure(
        spec, as_size(p.at("samples")), as_u64(p.at("seed")),
        as_size(p.at("workers")));

    Csv c;
    c.line({"samples", "hits", "probability", "std_error"});
    c.line({std::to_string(est.samples), std::to_string(est.hits),
            fmt(est.probability), fmt(est.std_error)});
    files.emplace_back("data/summary.csv", c.text);

    out["probability"] = est.probability;
    out["std_error"] = est.std_error;
    out["samples"] = est.samples;
    out["hits"] = est.hits;
    out["spec"] = spec_as_json(spec);
    if (est.hits == 0) warnings.push_back("no sample satisfied the constraints");
}

void append_volume_row(Csv& c, const VolumeEstimate& e) {
    c.line({e.estimator, std::to_string(e.k), fmt(e.raw_log_vol), fmt(e.normalized),
            fmt(e.std_error), std::to_string(e.samples_used), std::to_string(e.hits),
            e.containment ? "1" : "0", e.divergent ? "1" : "0",
            fmt(e.sample_log_vol)});
}

json volume_to_json(const VolumeEstimate& e) {
    return {{"estimator", e.estimator},
            {"k", e.k},
            {"raw_log_vol", jreal(e.raw_log_vol)},
            {"normalized", jreal(e.normalized)},
            {"std_error", jreal(e.std_error)},
            {"samples_used", e.samples_used},
            {"hits", e.hits},
            {"containment", e.containment},
            {"divergent", e.divergent},
            {"sample_log_vol", jreal(e.sample_log_vol)}};
}

void run_volume(const json& p, json& out, std::vector<std::string>& warnings,
                FileList& files) {
    const MicrostateSpec spec = resolve_spec(p);
    const std::size_t samples = as_size(p.at("samples"));
    const std::uint64_t seed = as_u64(p.at("seed"));
    const std::size_t workers = as_size(p.at("workers"));
    const std::string which = p.at("estimator");
    const double radius_param = p.value("radius", 0.0);
    const double R = radius_param > 0.0 ? radius_param : spec.radius_bound;

    Csv c;
    c.line({"estimator", "k", "raw_log_vol", "normalized", "std_error", "samples",
            "hits", "containment", "divergent", "sample_log_vol"});

    json ests = json::array();
    VolumeEstimate ball{}, gauss{};
    const bool want_ball = which == "ball" || which == "both";
    const bool want_gauss = which == "gaussian" || which == "both";
    if (want_ball) {
        ball = estimate_volume_ball(spec, R, samples, seed, workers);
        append_volume_row(c, ball);
        ests.push_back(volume_to_json(ball));
        if (ball.hits == 0)
            warnings.push_back("ball estimator: zero hits; volume reported as -inf");
        if (!ball.containment)
            warnings.push_back("sampling ball radius " + fmt(R) +
                               " does not certify containment; the estimate covers "
                               "the intersection with the ball");
    }
    if (want_gauss) {
        gauss = estimate_volume_gaussian(spec, samples, seed, workers);
        append_volume_row(c, gauss);
        ests.push_back(volume_to_json(gauss));
        if (gauss.hits == 0)
            warnings.push_back("gaussian estimator: zero hits; volume reported as -inf");
        if (gauss.divergent)
            warnings.push_back(
                "gaussian importance integral diverges (unbounded coordinate); "
                "finite-sample value kept in sample_log_vol");
    }
    files.emplace_back("data/estimates.csv", c.text);

    out["estimates"] = ests;
    out["effective_radius"] = R;
    out["spec"] = spec_as_json(spec);
    if (want_ball && want_gauss && std::isfinite(ball.raw_log_vol) &&
        std::isfinite(gauss.raw_log_vol)) {
        const double combined = std::hypot(ball.std_error, gauss.std_error);
        out["agreement_sigma"] =
            jreal(std::abs(ball.raw_log_vol - gauss.raw_log_vol) / combined);
    }
}

void run_covering(const json& p, json& out, std::vector<std::string>& warnings,
                  FileList& files) {
    const CoveringFitReport rep = ball_covering_bounds_check(
        as_size(p.at("k")), p.at("radius").get<double>(),
        p.at("eps").get<std::vector<double>>(), as_size(p.at("samples")),
        as_u64(p.at("seed")), parse_metric(p.at("metric")),
        as_size(p.at("workers")));

    Csv nets;
    nets.line({"epsilon", "net_size", "normalized", "sample_fraction"});
    const double kk2 = double(rep.k) * double(rep.k);
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
        const double frac = double(rep.net_sizes[i]) / double(rep.samples);
        nets.line({fmt(rep.eps[i]), std::to_string(rep.net_sizes[i]),
                   fmt(std::log(double(rep.net_sizes[i])) / kk2), fmt(frac)});
        if (frac > 0.35)
            warnings.push_back("epsilon " + fmt(rep.eps[i]) +
                               ": net saturates on the sample count and is excluded "
                               "from the exponent fit");
    }
    files.emplace_back("data/nets.csv", nets.text);

    Csv summary;
    summary.line({"k", "radius", "metric", "samples", "slope", "slope_ratio",
                  "slope_in_range", "c1", "c2"});
    summary.line({std::to_string(rep.k), fmt(rep.radius),
                  rep.metric == Metric::hs ? "hs" : "uniform",
                  std::to_string(rep.samples), fmt(rep.slope), fmt(rep.slope_ratio),
                  rep.slope_in_range ? "1" : "0", fmt(rep.c1), fmt(rep.c2)});
    files.emplace_back("data/summary.csv", summary.text);

    out["net_sizes"] = rep.net_sizes;
    out["eps"] = rep.eps;
    out["slope"] = jreal(rep.slope);
    out["slope_ratio"] = jreal(rep.slope_ratio);
    out["slope_in_range"] = rep.slope_in_range;
    out["c1"] = jreal(rep.c1);
    out["c2"] = jreal(rep.c2);
    if (!rep.slope_in_range)
        warnings.push_back("fitted covering exponent ratio " + fmt(rep.slope_ratio) +
                           " lies outside [0.7, 1.3]");
}

void run_dimension(const json& p, json& out, std::vector<std::string>& warnings,
                   FileList& files) {
    const PresetParsed preset = parse_preset(p.at("preset"));
    const std::size_t n = as_size(p.at("n"));
    const double spec_eps = p.at("spec_eps").get<double>();
    const std::size_t degree = as_size(p.at("degree"));
    std::function<MicrostateSpec(std::size_t)> family;
    switch (preset.kind) {
        case PresetParsed::vacuous:
            family = [n](std::size_t k) { return vacuous_spec(n, k); };
            break;
        case PresetParsed::semicircular:
            family = [n, spec_eps](std::size_t k) {
                return semicircular_spec(n, k, spec_eps);
            };
            break;
        case PresetParsed::interval:
            family = [preset, spec_eps, degree](std::size_t k) {
                return interval_spec(preset.a, preset.b, k, spec_eps, degree);
            };
            break;
    }

    const auto k_grid = as_size_vec(p.at("k_grid"));
    const DimensionReport rep = delta_top_estimate(
        family, k_grid, p.at("eps_grid").get<std::vector<double>>(),
        p.at("radius").get<double>(), as_size(p.at("samples")),
        as_u64(p.at("seed")), parse_metric(p.at("metric")),
        as_size(p.at("workers")));

    Csv cells;
    cells.line({"k", "epsilon", "accepted", "net_size", "value", "resolved"});
    for (const auto& cell : rep.cells) {
        cells.line({std::to_string(cell.k), fmt(cell.epsilon),
                    std::to_string(cell.accepted), std::to_string(cell.net_size),
                    fmt(cell.value), cell.resolved ? "1" : "0"});
        if (!cell.resolved)
            warnings.push_back("cell k=" + std::to_string(cell.k) + " eps=" +
                               fmt(cell.epsilon) + " unresolved (accepted=" +
                               std::to_string(cell.accepted) + ", net=" +
                               std::to_string(cell.net_size) + "); excluded");
    }
    files.emplace_back("data/cells.csv", cells.text);

    Csv deps;
    deps.line({"epsilon", "d_eps", "resolved", "residual"});
    for (std::size_t e = 0; e < rep.eps.size(); ++e)
        deps.line({fmt(rep.eps[e]), fmt(rep.d_eps[e]), rep.eps_resolved[e] ? "1" : "0",
                   fmt(rep.residuals[e])});
    files.emplace_back("data/deps.csv", deps.text);

    out["slope"] = rep.slope;
    out["k_grid"] = rep.k_grid;
    out["eps_grid"] = rep.eps;
    out["d_eps"] = rep.d_eps;
    out["family"] = {{"preset", p.at("preset")},
                     {"n", n},
                     {"spec_eps", spec_eps},
                     {"degree", degree}};
    out["notes"] =
        "d_eps maximizes over the finite k grid (a stand-in for the large-k "
        "limit) and the constraint family is fixed for the whole run";
}

void run_trace_pinning(const json& p, json& out, std::vector<std::string>& warnings,
                       FileList& files) {
    const TracePinningReport rep = trace_pinning_check(
        as_size(p.at("k")), p.at("eps").get<double>(),
        as_size(p.at("samples")), as_u64(p.at("seed")),
        as_size(p.at("workers")));

    Csv summary;
    summary.line({"delta", "fraction"});
    json fr = json::object();
    for (std::size_t i = 0; i < rep.deltas.size(); ++i) {
        summary.line({fmt(rep.deltas[i]), fmt(rep.fractions[i])});
        fr[fmt(rep.deltas[i])] = rep.fractions[i];
    }
    files.emplace_back("data/summary.csv", summary.text);

    Csv m2;
    m2.line({"index", "m2"});
    for (std::size_t i = 0; i < rep.m2_accepted.size(); ++i)
        m2.line({std::to_string(i), fmt(rep.m2_accepted[i])});
    files.emplace_back("data/m2.csv", m2.text);

    out["k"] = rep.k;
    out["epsilon"] = rep.epsilon;
    out["samples"] = rep.samples;
    out["accepted"] = rep.accepted;
    out["fractions"] = fr;
    out["mean_m2"] = jreal(rep.accepted ? rep.mean_m2
                                        : std::numeric_limits<double>::quiet_NaN());
    out["sd_m2"] = jreal(rep.accepted ? rep.sd_m2
                                      : std::numeric_limits<double>::quiet_NaN());
    if (rep.accepted == 0)
        warnings.push_back("no sample entered the preset window");
}

// ---- defaults and validation ----------------------------------------------

json defaults_for(const std::string& command) {
    if (command == "capacity" || command == "eqmeasure")
        return {{"grid", 2000}, {"seed", 0}};
    if (command == "gue-norms")
        return {{"dims", {50, 100, 200, 400}}, {"trials", 20}, {"seed", 0},
                {"workers", 1}};
    if (command == "ht-check")
        return {{"n", 1}, {"poly", "X1"}, {"dims", {50, 100, 200}}, {"trials", 20},
                {"seed", 0}, {"workers", 1}};
    if (command == "gamma-measure")
        return {{"n", 1}, {"eps", 0.5}, {"degree", 3}, {"k", 200}, {"samples", 200},
                {"seed", 0}, {"workers", 1}};
    if (command == "volume")
        return {{"n", 1}, {"eps", 0.5}, {"degree", 3}, {"k", 2}, {"radius", 0.0},
                {"samples", 20000}, {"estimator", "both"}, {"seed", 0},
                {"workers", 1}};
    if (command == "covering")
        return {{"k", 1}, {"radius", 1.0}, {"eps", {0.5, 0.2, 0.1, 0.05}},
                {"samples", 2000}, {"metric", "uniform"}, {"seed", 0}, {"workers", 1}};
    if (command == "dimension")
        return {{"preset", "vacuous"}, {"n", 1}, {"spec_eps", 0.5}, {"degree", 3},
                {"k_grid", {1, 2, 3}}, {"eps_grid", {0.4, 0.2, 0.1}},
                {"radius", 1.0}, {"samples", 4000}, {"metric", "uniform"},
                {"seed", 0}, {"workers", 1}};
    if (command == "trace-pinning")
        return {{"k", 200}, {"eps", 0.5}, {"samples", 100}, {"seed", 0},
                {"workers", 1}};
    throw ValidationError("unknown command: " + command);
}

bool is_integerish(const json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::trunc(d) && std::abs(d) <= 9.0e15;
}

void schema_check(const json& v, const json& schema, const json& root,
                  const std::string& where) {
    if (schema.contains("$ref")) {
        const std::string ref = schema.at("$ref");
        if (ref.empty() || ref[0] != '#')
            throw ValidationError(where + ": unsupported $ref " + ref);
        const json* target = nullptr;
        try {
            target = &root.at(nlohmann::json::json_pointer(ref.substr(1)));
        } catch (const std::exception&) {
            throw ValidationError(where + ": dangling $ref " + ref);
        }
        schema_check(v, *target, root, where);
        return;
    }
    if (schema.contains("type")) {
        const std::string t = schema.at("type");
        bool ok = false;
        if (t == "object") ok = v.is_object();
        else if (t == "array") ok = v.is_array();
        else if (t == "string") ok = v.is_string();
        else if (t == "boolean") ok = v.is_boolean();
        else if (t == "number") ok = v.is_number();
        else if (t == "integer") ok = is_integerish(v);
        else throw ValidationError(where + ": unsupported schema type " + t);
        if (!ok) throw ValidationError(where + ": expected " + t);
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& e : schema.at("enum"))
            if (e == v) ok = true;
        if (!ok) throw ValidationError(where + ": value not in the allowed set");
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (schema.contains("minimum") && x < schema.at("minimum").get<double>())
            throw ValidationError(where + ": below minimum " +
                                  fmt(schema.at("minimum").get<double>()));
        if (schema.contains("maximum") && x > schema.at("maximum").get<double>())
            throw ValidationError(where + ": above maximum " +
                                  fmt(schema.at("maximum").get<double>()));
        if (schema.contains("exclusiveMinimum") &&
            x <= schema.at("exclusiveMinimum").get<double>())
            throw ValidationError(where + ": must exceed " +
                                  fmt(schema.at("exclusiveMinimum").get<double>()));
    }
    if (v.is_array()) {
        if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>())
            throw ValidationError(where + ": fewer than " +
                                  std::to_string(schema.at("minItems").get<std::size_t>()) +
                                  " entries");
        if (schema.contains("maxItems") && v.size() > schema.at("maxItems").get<std::size_t>())
            throw ValidationError(where + ": more than " +
                                  std::to_string(schema.at("maxItems").get<std::size_t>()) +
                                  " entries");
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < v.size(); ++i)
                schema_check(v[i], schema.at("items"), root,
                             where + "[" + std::to_string(i) + "]");
        }
    }
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& r : schema.at("required"))
                if (!v.contains(r.get<std::string>()))
                    throw ValidationError(where + ": missing required parameter '" +
                                          r.get<std::string>() + "'");
        const bool closed = schema.contains("additionalProperties") &&
                            schema.at("additionalProperties").is_boolean() &&
                            !schema.at("additionalProperties").get<bool>();
        for (const auto& [key, val] : v.items()) {
            if (schema.contains("properties") && schema.at("properties").contains(key))
                schema_check(val, schema.at("properties").at(key), root,
                             where + "." + key);
            else if (closed)
                throw ValidationError(where + ": unknown parameter '" + key + "'");
        }
    }
}

std::string read_text_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(std::string("cannot read ") + what + ": " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

const json& config_schema() {
    static const json schema = json::parse(embedded::config_schema_text);
    return schema;
}

const json& manifest_schema() {
    static const json schema = json::parse(embedded::manifest_schema_text);
    return schema;
}

void validate_against_schema(const json& value, const json& schema,
                             const std::string& where) {
    schema_check(value, schema, schema, where);
}

void validate_config(const ExperimentConfig& cfg) {
    const json& cs = config_schema();
    if (!cs.at("$defs").contains(cfg.command))
        throw ValidationError("unknown command: " + cfg.command);
    schema_check(cfg.params, cs.at("$defs").at(cfg.command), cs, "params");
    const json& p = cfg.params;

    if (cfg.command == "capacity" || cfg.command == "eqmeasure") {
        const RealCompact K = RealCompact::make(parse_interval_list(p.at("intervals")));
        if (cfg.command == "eqmeasure" && !K.has_interior())
            throw ValidationError(
                "eqmeasure needs an interval of positive length");
    }
    if (cfg.command == "ht-check")
        NCPolynomial::parse(p.at("poly"), as_size(p.at("n")));
    if (cfg.command == "gamma-measure" || cfg.command == "volume") {
        if (p.contains("preset") && p.contains("spec"))
            throw ValidationError("give either a preset or an inline spec, not both");
        if (p.contains("preset")) parse_preset(p.at("preset"));
        if (p.contains("spec")) spec_from_json_text(p.at("spec").dump());
    }
    if (cfg.command == "covering") {
        const double R = p.at("radius").get<double>();
        for (const auto& e : p.at("eps"))
            if (e.get<double>() > R)
                throw ValidationError("covering: every epsilon must be <= radius");
    }
    if (cfg.command == "dimension") {
        parse_preset(p.at("preset"));
        const auto grid = p.at("eps_grid").get<std::vector<double>>();
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            if (!(grid[i] > grid[i + 1]))
                throw ValidationError("dimension: eps_grid must strictly decrease");
    }
}

ExperimentConfig make_config(const std::string& command, const json& flag_params,
                             const std::string& config_file_path) {
    json merged = defaults_for(command);
    if (!flag_params.is_null()) {
        if (!flag_params.is_object())
            throw ValidationError("flag parameters must form a JSON object");
        for (const auto& [key, val] : flag_params.items()) merged[key] = val;
    }
    if (!config_file_path.empty()) {
        const std::string text = read_text_file(config_file_path, "config file");
        json file_obj;
        try {
            file_obj = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("config file: ") + e.what());
        }
        if (!file_obj.is_object())
            throw ValidationError("config file must hold a JSON object");
        if (file_obj.contains("command")) {
            if (file_obj.at("command") != command)
                throw ValidationError("config file names command '" +
                                      file_obj.at("command").get<std::string>() +
                                      "' but '" + command + "' was invoked");
            file_obj.erase("command");
        }
        for (const auto& [key, val] : file_obj.items()) merged[key] = val;
    }
    if (merged.contains("spec_path")) {
        const std::string text =
            read_text_file(merged.at("spec_path"), "spec file");
        spec_from_json_text(text);  // validates
        merged["spec"] = json::parse(text);
        merged.erase("spec_path");
    }

    ExperimentConfig cfg{command, std::move(merged)};
    validate_config(cfg);
    return cfg;
}

std::string hash_config(const ExperimentConfig& cfg) {
    return hex16(fnv1a(cfg.command + "\n" + cfg.params.dump()));
}

std::string default_outdir() {
    const char* env = std::getenv("FREENT_OUTDIR");
    return env && *env ? env : "out";
}

json ResultManifest::to_json() const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["kernels"] = kernels;
    j["seed"] = seed;
    j["outputs"] = outputs;
    j["data_files"] = data_files;
    j["warnings"] = warnings;
    j["timing"] = {{"wall_clock_seconds", wall_clock_seconds}};
    return j;
}

ResultManifest run_experiment(const ExperimentConfig& cfg, const std::string& outdir) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    ResultManifest rm;
    rm.command = cfg.command;
    rm.config = cfg.params;
    rm.config_hash = hash_config(cfg);
    rm.tool_version = tool_version_string;
    rm.kernels = kern::backend_name();
    rm.seed = as_u64(cfg.params.at("seed"));
    rm.outputs = json::object();

    FileList files;
    if (cfg.command == "capacity")
        run_equilibrium_family(cfg.params, true, rm.outputs, rm.warnings, files);
    else if (cfg.command == "eqmeasure")
        run_equilibrium_family(cfg.params, false, rm.outputs, rm.warnings, files);
    else if (cfg.command == "gue-norms")
        run_gue_norms(cfg.params, rm.outputs, rm.warnings, files);
    else if (cfg.command == "ht-check")
        run_ht_check(cfg.params, rm.outputs, rm.warnings, files);
    else if (cfg.command == "gamma-measure")
        run_gamma_measure(cfg.params, rm.outputs, rm.warnings, files);
    else if (cfg.command == "volume")
        run_volume(cfg.params, rm.outputs, rm.warnings, files);
    else if (cfg.command == "covering")
        run_covering(cfg.params, rm.outputs, rm.warnings, files);
    else if (cfg.command == "dimension")
        run_dimension(cfg.params, rm.outputs, rm.warnings, files);
    else if (cfg.command == "trace-pinning")
        run_trace_pinning(cfg.params, rm.outputs, rm.warnings, files);
    else
        throw ValidationError("unknown command: " + cfg.command);

    rm.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path run_dir = fs::path(outdir) / (cfg.command + "-" + rm.config_hash);
    std::error_code ec;
    fs::create_directories(run_dir / "data", ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " +
                                 (run_dir / "data").string() + ": " + ec.message());
    for (const auto& [name, content] : files) {
        const fs::path path = run_dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out || !(out << content) || !out.flush())
            throw std::runtime_error("cannot write " + path.string());
        rm.data_files.push_back(name);
    }

    const json mj = rm.to_json();
    validate_against_schema(mj, manifest_schema(), "manifest");
    const fs::path mpath = run_dir / "manifest.json";
    std::ofstream mout(mpath, std::ios::binary | std::ios::trunc);
    if (!mout || !(mout << mj.dump(2) << "\n") || !mout.flush())
        throw std::runtime_error("cannot write " + mpath.string());

    rm.run_dir = run_dir.string();
    return rm;
}

} // namespace freent
