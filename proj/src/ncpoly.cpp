#include "freent/ncpoly.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "freent/eigen.hpp"
#include "freent/errors.hpp"
#include "freent/kernels.hpp"

namespace freent {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

NCPolynomial::NCPolynomial(std::size_t arity, std::map<Word, std::complex<double>> terms)
    : arity_(arity), terms_(std::move(terms)) {
    if (arity_ == 0) throw ValidationError("polynomial arity must be >= 1");
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == std::complex<double>(0.0, 0.0)) it = terms_.erase(it);
        else ++it;
    }
}

std::size_t NCPolynomial::degree() const {
    std::size_t d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w.size());
    return d;
}

NCPolynomial NCPolynomial::coordinate(std::size_t arity, std::size_t var_index_1based) {
    if (var_index_1based < 1 || var_index_1based > arity)
        throw ValidationError("coordinate index out of range");
    std::map<Word, std::complex<double>> t;
    t[Word{std::uint32_t(var_index_1based - 1)}] = 1.0;
    return {arity, std::move(t)};
}

NCPolynomial NCPolynomial::constant(std::size_t arity, std::complex<double> c) {
    std::map<Word, std::complex<double>> t;
    t[Word{}] = c;
    return {arity, std::move(t)};
}

NCPolynomial NCPolynomial::adjoint() const {
    std::map<Word, std::complex<double>> t;
    for (const auto& [w, c] : terms_) {
        Word r(w.rbegin(), w.rend());
        t[std::move(r)] += std::conj(c);
    }
    return {arity_, std::move(t)};
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& o) const {
    if (arity_ != o.arity_) throw ValidationError("polynomial sum: arity mismatch");
    auto t = terms_;
    for (const auto& [w, c] : o.terms_) t[w] += c;
    return {arity_, std::move(t)};
}

NCPolynomial NCPolynomial::operator-(const NCPolynomial& o) const {
    return *this + o.scaled(-1.0);
}

NCPolynomial NCPolynomial::operator*(const NCPolynomial& o) const {
    if (arity_ != o.arity_) throw ValidationError("polynomial product: arity mismatch");
    std::map<Word, std::complex<double>> t;
    for (const auto& [w1, c1] : terms_)
        for (const auto& [w2, c2] : o.terms_) {
            Word w = w1;
            w.insert(w.end(), w2.begin(), w2.end());
            if (w.size() > max_degree)
                throw ValidationError("polynomial product exceeds degree cap 32");
            t[std::move(w)] += c1 * c2;
        }
    return {arity_, std::move(t)};
}

NCPolynomial NCPolynomial::scaled(std::complex<double> c) const {
    auto t = terms_;
    for (auto& [w, v] : t) v *= c;
    return {arity_, std::move(t)};
}

namespace {

struct Parser {
    const std::string& s;
    std::size_t arity;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("polynomial syntax error at position " +
                              std::to_string(pos) + ": " + what);
    }
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }

    double real_number() {
        skip_ws();
        double sign = 1.0;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -1.0;
            ++pos;
        }
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            fail("expected number");
        double v = 0.0;
        const auto res = std::from_chars(s.data() + pos, s.data() + s.size(), v);
        if (res.ec != std::errc{} || !std::isfinite(v)) fail("bad numeric literal");
        pos = std::size_t(res.ptr - s.data());
        return sign * v;
    }

    std::uint32_t variable() {
        if (peek() != 'X') fail("expected variable");
        ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            fail("expected variable index after X");
        std::uint64_t idx = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            idx = idx * 10 + std::uint64_t(s[pos] - '0');
            if (idx > 1'000'000) fail("variable index too large");
            ++pos;
        }
        if (idx < 1 || idx > arity)
            throw ValidationError("variable index " + std::to_string(idx) +
                                  " out of range [1, " + std::to_string(arity) + "]");
        return std::uint32_t(idx - 1);
    }

    Word word_tail(std::uint32_t first) {
        Word w{first};
        while (true) {
            const std::size_t save = pos;
            if (!eat('*')) break;
            if (peek() != 'X') { pos = save; break; }
            w.push_back(variable());
            if (w.size() > NCPolynomial::max_degree)
                throw ValidationError("word exceeds degree cap 32");
        }
        return w;
    }

    // coeff := REAL | '(' REAL ',' REAL ')' | 'i' | REAL '*' 'i'
    std::complex<double> coefficient() {
        if (eat('(')) {
            const double re = real_number();
            if (!eat(',')) fail("expected ',' in complex coefficient");
            const double im = real_number();
            if (!eat(')')) fail("expected ')' in complex coefficient");
            return {re, im};
        }
        if (peek() == 'i') { ++pos; return {0.0, 1.0}; }
        const double re = real_number();
        const std::size_t save = pos;
        if (eat('*') && peek() == 'i') {
            ++pos;
            return {0.0, re};
        }
        pos = save;
        return {re, 0.0};
    }

    // term := coeff ('*' word)? | word
    void term(std::map<Word, std::complex<double>>& acc, double outer_sign) {
        std::complex<double> coeff(outer_sign, 0.0);
        Word w;
        if (peek() == 'X') {
            w = word_tail(variable());
        } else {
            coeff *= coefficient();
            const std::size_t save = pos;
            if (eat('*')) {
                if (peek() == 'X') w = word_tail(variable());
                else { pos = save; fail("expected variable after '*'"); }
            }
        }
        acc[std::move(w)] += coeff;
    }

    std::map<Word, std::complex<double>> poly() {
        std::map<Word, std::complex<double>> acc;
        double sign = 1.0;
        if (eat('-')) sign = -1.0;
        else eat('+');
        term(acc, sign);
        while (true) {
            const char c = peek();
            if (c == '+' || c == '-') {
                ++pos;
                term(acc, c == '-' ? -1.0 : 1.0);
            } else break;
        }
        skip_ws();
        if (pos != s.size()) fail("trailing input");
        return acc;
    }
};

} // namespace

NCPolynomial NCPolynomial::parse(const std::string& text, std::size_t arity) {
    if (arity == 0) throw ValidationError("polynomial arity must be >= 1");
    Parser p{text, arity};
    return {arity, p.poly()};
}

std::string NCPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        std::string coeff, sep;
        if (c.imag() == 0.0) {
            const double re = c.real();
            const double mag = std::abs(re);
            sep = (re < 0.0) ? (first ? "-" : " - ") : (first ? "" : " + ");
            if (w.empty() || mag != 1.0) coeff = format_double(mag);
        } else {
            sep = first ? "" : " + ";
            if (c.real() == 0.0 && c.imag() == 1.0 && !w.empty()) coeff = "i";
            else coeff = "(" + format_double(c.real()) + "," + format_double(c.imag()) + ")";
        }
        out += sep;
        out += coeff;
        for (std::size_t l = 0; l < w.size(); ++l) {
            if (l > 0 || !coeff.empty()) out += "*";
            out += "X" + std::to_string(w[l] + 1);
        }
        first = false;
    }
    return out;
}

CMat eval(const NCPolynomial& p, const MatrixTuple& t) {
    if (t.arity() != p.arity())
        throw ValidationError("eval: tuple arity " + std::to_string(t.arity()) +
                              " does not match polynomial arity " +
                              std::to_string(p.arity()));
    const std::size_t k = t.dim();
    const auto& kn = kern::ops();
    CMat acc(k);
    for (const auto& [w, c] : p.terms()) {
        CMat prod(k);
        if (w.empty()) {
            for (std::size_t i = 0; i < k; ++i) prod.re[i * k + i] = 1.0;
        } else {
            prod = t[w[0]].to_cmat();
            for (std::size_t l = 1; l < w.size(); ++l)
                prod = cmul(prod, t[w[l]].to_cmat());
        }
        const double cr = c.real(), ci = c.imag();
        kn.axpby(cr, prod.re.data(), 1.0, acc.re.data(), k * k);
        kn.axpby(cr, prod.im.data(), 1.0, acc.im.data(), k * k);
        if (ci != 0.0) {
            kn.axpby(-ci, prod.im.data(), 1.0, acc.re.data(), k * k);
            kn.axpby(ci, prod.re.data(), 1.0, acc.im.data(), k * k);
        }
    }
    return acc;
}

double poly_norm_at(const NCPolynomial& p, const MatrixTuple& t) {
    const CMat v = eval(p, t);
    const double resid = v.herm_residual();
    if (resid <= 1e-10 * std::max(1.0, v.frob_norm()))
        return opnorm_hermitian_part(v);
    const CMat w = cmul(v.adjoint(), v);
    const double top = opnorm_hermitian_part(w);
    return std::sqrt(std::max(0.0, top));
}

} // namespace freent
