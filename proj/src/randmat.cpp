#include "freent/randmat.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "freent/errors.hpp"
#include "freent/rng.hpp"

namespace freent {
namespace {

constexpr std::size_t ball_k_cap = 12;

double log_factorial(std::size_t n) { return std::lgamma(double(n) + 1.0); }

// Interior critical points of the Legendre polynomial P_m, located by sign
// scan and bisection of g(x) = x P_m(x) - P_{m-1}(x), which shares its
// interior zeros with (x^2 - 1) P_m'(x) / m.
std::vector<double> legendre_deriv_roots(std::size_t m) {
    if (m < 2) return {};
    auto g = [m](double x) {
        double p0 = 1.0, p1 = x;
        for (std::size_t l = 1; l < m; ++l) {
            const double p2 = ((2.0 * l + 1.0) * x * p1 - double(l) * p0) / double(l + 1);
            p0 = p1;
            p1 = p2;
        }
        return x * p1 - p0;
    };
    std::vector<double> roots;
    const std::size_t grid = 16 * m + 32;
    double xa = -1.0 + 1e-9, ga = g(xa);
    for (std::size_t i = 1; i <= grid; ++i) {
        const double xb = -1.0 + 2.0 * double(i) / double(grid) - (i == grid ? 1e-9 : 0.0);
        const double gb = g(xb);
        if (ga == 0.0) roots.push_back(xa);
        else if (ga * gb < 0.0) {
            double lo = xa, hi = xb, glo = ga;
            for (int it = 0; it < 90; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if (glo * gm <= 0.0) hi = mid;
                else { lo = mid; glo = gm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        ga = gb;
    }
    return roots;
}

// max over [-1,1]^k of prod_{i<j} (x_i - x_j)^2, attained at the
// Gauss-Lobatto points {-1, roots of P_{k-1}', 1}.
double vandermonde_sq_bound(std::size_t k) {
    if (k < 2) return 1.0;
    std::vector<double> nodes{-1.0};
    for (double r : legendre_deriv_roots(k - 1)) nodes.push_back(r);
    nodes.push_back(1.0);
    double logv = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            logv += 2.0 * std::log(std::abs(nodes[i] - nodes[j]));
    return std::exp(logv) * (1.0 + 1e-9);
}

const std::array<double, ball_k_cap + 1>& vandermonde_bounds() {
    static const std::array<double, ball_k_cap + 1> table = [] {
        std::array<double, ball_k_cap + 1> t{};
        for (std::size_t k = 0; k <= ball_k_cap; ++k) t[k] = vandermonde_sq_bound(k);
        return t;
    }();
    return table;
}

HermitianMatrix gue_component(std::size_t k, std::uint64_t seed,
                              std::uint64_t index, std::uint8_t component) {
    RngStream st(seed, stream_id(stream_tag::gue, index, component));
    const double sd = 1.0 / std::sqrt(double(k));
    const double so = 1.0 / std::sqrt(2.0 * double(k));
    CMat m(k);
    for (std::size_t i = 0; i < k; ++i) {
        m.re[i * k + i] = sd * st.next_gaussian();
        for (std::size_t j = i + 1; j < k; ++j) {
            const double re = so * st.next_gaussian();
            const double im = so * st.next_gaussian();
            m.re[i * k + j] = re;
            m.re[j * k + i] = re;
            m.im[i * k + j] = im;
            m.im[j * k + i] = -im;
        }
    }
    return HermitianMatrix(m);
}

HermitianMatrix ball_component(std::size_t k, double R, std::uint64_t seed,
                               std::uint64_t index, std::uint8_t component) {
    const double bound = vandermonde_bounds()[k];
    RngStream eig(seed, stream_id(stream_tag::ball_eigen, index, component));
    std::vector<double> lam(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) lam[i] = 2.0 * eig.next_unit() - 1.0;
        double prod = 1.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                const double d = lam[i] - lam[j];
                prod *= d * d;
            }
        if (prod > bound * (1.0 + 1e-9))
            throw NumericError("ball sampler: proposal exceeded the Vandermonde bound");
        if (eig.next_unit() * bound <= prod) break;
    }
    for (double& v : lam) v *= R;

    if (k == 1) return HermitianMatrix::diagonal(lam);

    // Haar unitary: Gram-Schmidt on a complex Ginibre matrix.  The positive
    // diagonal of the implied R factor is exactly the choice that makes Q
    // Haar distributed.
    RngStream gin(seed, stream_id(stream_tag::ball_unitary, index, component));
    CMat q(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> vre(k), vim(k);
        for (std::size_t i = 0; i < k; ++i) {
            vre[i] = gin.next_gaussian();
            vim[i] = gin.next_gaussian();
        }
        for (std::size_t l = 0; l < j; ++l) {
            double rre = 0.0, rim = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                rre += q.re[i * k + l] * vre[i] + q.im[i * k + l] * vim[i];
                rim += q.re[i * k + l] * vim[i] - q.im[i * k + l] * vre[i];
            }
            for (std::size_t i = 0; i < k; ++i) {
                vre[i] -= rre * q.re[i * k + l] - rim * q.im[i * k + l];
                vim[i] -= rre * q.im[i * k + l] + rim * q.re[i * k + l];
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < k; ++i) nrm += vre[i] * vre[i] + vim[i] * vim[i];
        nrm = std::sqrt(nrm);
        if (!(nrm > 1e-8))
            throw NumericError("ball sampler: degenerate Ginibre column");
        for (std::size_t i = 0; i < k; ++i) {
            q.re[i * k + j] = vre[i] / nrm;
            q.im[i * k + j] = vim[i] / nrm;
        }
    }

    CMat a(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double sre = 0.0, sim = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                const double ur = q.re[i * k + l], ui = q.im[i * k + l];
                const double vr = q.re[j * k + l], vi = q.im[j * k + l];
                sre += lam[l] * (ur * vr + ui * vi);
                sim += lam[l] * (ui * vr - ur * vi);
            }
            a.re[i * k + j] = sre;
            a.im[i * k + j] = sim;
        }
    return HermitianMatrix(a);
}

} // namespace

void validate(const SamplerConfig& cfg) {
    if (cfg.k < 1) throw ValidationError("sampler: dimension k must be >= 1");
    if (cfg.n < 1) throw ValidationError("sampler: arity n must be >= 1");
    if (cfg.n > 255) throw ValidationError("sampler: arity n must be <= 255");
    if (cfg.kind == SamplerConfig::Kind::ball) {
        if (!(cfg.radius > 0.0)) throw ValidationError("sampler: radius must be > 0");
        if (cfg.k > ball_k_cap)
            throw ValidationError(
                "exact ball sampler is capped at k = 12; use Gaussian sampling "
                "with importance weights beyond that");
    }
}

MatrixTuple sample_tuple(const SamplerConfig& cfg, std::uint64_t index) {
    validate(cfg);
    std::vector<HermitianMatrix> mats;
    mats.reserve(cfg.n);
    for (std::size_t j = 0; j < cfg.n; ++j) {
        if (cfg.kind == SamplerConfig::Kind::gue)
            mats.push_back(gue_component(cfg.k, cfg.seed, index, std::uint8_t(j)));
        else
            mats.push_back(ball_component(cfg.k, cfg.radius, cfg.seed, index, std::uint8_t(j)));
    }
    return MatrixTuple(std::move(mats));
}

MatrixTuple sample_gue(std::size_t k, std::size_t n, std::uint64_t seed,
                       std::uint64_t index) {
    SamplerConfig cfg;
    cfg.k = k;
    cfg.n = n;
    cfg.seed = seed;
    cfg.kind = SamplerConfig::Kind::gue;
    return sample_tuple(cfg, index);
}

MatrixTuple sample_ball(std::size_t k, std::size_t n, double R,
                        std::uint64_t seed, std::uint64_t index) {
    SamplerConfig cfg;
    cfg.k = k;
    cfg.n = n;
    cfg.seed = seed;
    cfg.kind = SamplerConfig::Kind::ball;
    cfg.radius = R;
    return sample_tuple(cfg, index);
}

double log_c_k(std::size_t k, std::size_t n) {
    if (k < 1 || n < 1) throw ValidationError("log_c_k: k and n must be >= 1");
    const double kk = double(k);
    return 0.5 * double(n) * kk * kk * (std::log(kk) - std::log(2.0 * M_PI));
}

double log_ball_volume(std::size_t k, std::size_t n, double R) {
    if (k < 1 || n < 1) throw ValidationError("log_ball_volume: k and n must be >= 1");
    if (!(R > 0.0)) throw ValidationError("log_ball_volume: R must be > 0");
    const double kk = double(k);
    double log_sk = kk * kk * std::log(2.0);
    for (std::size_t j = 0; j < k; ++j)
        log_sk += 2.0 * log_factorial(j) + log_factorial(j + 1) - log_factorial(k + j);
    double logv = 0.5 * kk * (kk - 1.0) * std::log(2.0 * M_PI) - log_factorial(k);
    for (std::size_t j = 1; j < k; ++j) logv -= log_factorial(j);
    logv += log_sk + kk * kk * std::log(R);
    return double(n) * logv;
}

} // namespace freent
