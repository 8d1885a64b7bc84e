#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "freent/eigen.hpp"
#include "freent/errors.hpp"
#include "freent/randmat.hpp"
#include "freent/rng.hpp"
#include "oracles.hpp"

using freent::HermitianMatrix;
using freent::MatrixTuple;
using freent::SamplerConfig;
using freent::ValidationError;
using cd = std::complex<double>;

namespace {

double tau_power(const HermitianMatrix& a, std::size_t p) {
    const auto vals = freent::eigenvalues(a);
    double s = 0;
    for (double v : vals) s += std::pow(v, double(p));
    return s / double(vals.size());
}

bool identical(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.re() == b.re() && a.im() == b.im();
}

}  // namespace

TEST_CASE("sampler config validation") {
    SamplerConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(freent::validate(cfg), ValidationError);
    cfg.k = 2;
    cfg.n = 0;
    CHECK_THROWS_AS(freent::validate(cfg), ValidationError);
    cfg.n = 1;
    cfg.kind = SamplerConfig::Kind::ball;
    cfg.radius = 0.0;
    CHECK_THROWS_AS(freent::validate(cfg), ValidationError);
    cfg.radius = 1.0;
    cfg.k = 13;  // rejection sampling capped
    CHECK_THROWS_AS(freent::validate(cfg), ValidationError);
    CHECK_THROWS_AS(freent::sample_ball(13, 1, 1.0, 0, 0), ValidationError);
    cfg.k = 12;
    freent::validate(cfg);  // largest admissible ball dimension
}

TEST_CASE("draws are pure functions of (config, index)") {
    const MatrixTuple a = freent::sample_gue(6, 2, 42, 7);
    const MatrixTuple b = freent::sample_gue(6, 2, 42, 7);
    REQUIRE(a.arity() == 2);
    CHECK(identical(a[0], b[0]));
    CHECK(identical(a[1], b[1]));
    CHECK(!identical(a[0], a[1]));  // components draw from distinct streams

    const MatrixTuple c = freent::sample_gue(6, 2, 42, 8);
    CHECK(!identical(a[0], c[0]));
    const MatrixTuple d = freent::sample_gue(6, 2, 43, 7);
    CHECK(!identical(a[0], d[0]));

    const MatrixTuple e = freent::sample_ball(4, 1, 1.5, 11, 3);
    const MatrixTuple f = freent::sample_ball(4, 1, 1.5, 11, 3);
    CHECK(identical(e[0], f[0]));
}

TEST_CASE("rng streams do not collide across tags or components") {
    freent::RngStream s1(9, freent::stream_id(freent::stream_tag::gue, 5, 0));
    freent::RngStream s2(9, freent::stream_id(freent::stream_tag::gue, 5, 1));
    freent::RngStream s3(9, freent::stream_id(freent::stream_tag::ball_eigen, 5, 0));
    const auto a = s1.next_u64(), b = s2.next_u64(), c = s3.next_u64();
    CHECK(a != b);
    CHECK(a != c);
    CHECK(b != c);

    // uniform outputs sit in [0,1) and the open variant avoids zero
    freent::RngStream s4(1, freent::stream_id(freent::stream_tag::test, 0));
    for (int i = 0; i < 1000; ++i) {
        const double u = s4.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = s4.next_unit_open();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gue matches its moment structure") {
    const std::size_t k = 8, trials = 3000;
    double m2 = 0, m4 = 0, diag_sq = 0, off_re_sq = 0, tr_im = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const MatrixTuple s = freent::sample_gue(k, 1, 5, t);
        m2 += tau_power(s[0], 2);
        m4 += tau_power(s[0], 4);
        diag_sq += std::norm(s[0].entry(0, 0));
        off_re_sq += s[0].entry(0, 1).real() * s[0].entry(0, 1).real();
        tr_im += std::abs(s[0].entry(2, 2).imag());
    }
    m2 /= trials;
    m4 /= trials;
    diag_sq /= trials;
    off_re_sq /= trials;
    CHECK(tr_im == 0.0);  // hermitian by construction, exactly

    // E tau(A^2) = 1 exactly at every k; MC error ~ sqrt(2)/k/sqrt(T)
    CHECK(std::abs(m2 - 1.0) <= 5.0 * std::sqrt(2.0) / (double(k) * std::sqrt(double(trials))));
    // E tau(A^4) = 2 + 1/k^2
    CHECK(std::abs(m4 - (2.0 + 1.0 / double(k * k))) <= 0.05);
    // entry variances: diagonal 1/k, off-diagonal parts 1/(2k)
    CHECK(std::abs(diag_sq - 1.0 / double(k)) <= 0.012);
    CHECK(std::abs(off_re_sq - 1.0 / double(2 * k)) <= 0.008);
}

TEST_CASE("gue norm concentrates near the soft edge") {
    const std::size_t k = 50, trials = 30;
    double mean = 0;
    for (std::size_t t = 0; t < trials; ++t)
        mean += freent::opnorm(freent::sample_gue(k, 1, 77, t)[0]);
    mean /= trials;
    const double edge = 2.0 - 1.77 * std::pow(double(k), -2.0 / 3.0);
    CHECK(std::abs(mean - edge) <= 0.1);
}

TEST_CASE("ball samples respect the norm bound exactly") {
    const double R = 1.3;
    for (std::size_t t = 0; t < 200; ++t) {
        const MatrixTuple s = freent::sample_ball(5, 1, R, 3, t);
        CHECK(freent::opnorm(s[0]) <= R + 1e-9);
    }
}

TEST_CASE("ball law at k=2 agrees with box rejection") {
    // Entrywise box proposal + accept when the closed-form 2x2 norm fits:
    // an independent route to the same uniform law.
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t want = 20000;
    double om2 = 0, omax = 0, omin = 0;
    std::size_t got = 0;
    while (got < want) {
        const double a = u(gen), d = u(gen), re = u(gen), im = u(gen);
        const double mid = 0.5 * (a + d);
        const double rad = std::sqrt(0.25 * (a - d) * (a - d) + re * re + im * im);
        const double lo = mid - rad, hi = mid + rad;
        if (std::max(std::abs(lo), std::abs(hi)) > 1.0) continue;
        ++got;
        om2 += 0.5 * (lo * lo + hi * hi);
        omax += hi;
        omin += lo;
    }
    om2 /= want;
    omax /= want;
    omin /= want;

    double lm2 = 0, lmax = 0, lmin = 0;
    for (std::size_t t = 0; t < want; ++t) {
        const auto vals = freent::eigenvalues(freent::sample_ball(2, 1, 1.0, 6, t)[0]);
        lm2 += 0.5 * (vals[0] * vals[0] + vals[1] * vals[1]);
        lmax += vals[1];
        lmin += vals[0];
    }
    lm2 /= want;
    lmax /= want;
    lmin /= want;

    // each moment is an O(1) bounded statistic: 4-sigma MC bands ~ 0.02
    CHECK(std::abs(lm2 - om2) <= 0.02);
    CHECK(std::abs(lmax - omax) <= 0.02);
    CHECK(std::abs(lmin - omin) <= 0.02);
    // symmetry of the law
    CHECK(std::abs(lmax + lmin) <= 0.02);
}

TEST_CASE("ball volume closed form at small k") {
    // k=1: an interval of length 2R
    CHECK(freent::log_ball_volume(1, 1, 3.0) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
    // k=2: (8 pi / 3) R^4 in trace-inner-product coordinates
    const double pi = 3.14159265358979323846;
    CHECK(freent::log_ball_volume(2, 1, 1.0) ==
          doctest::Approx(std::log(8.0 * pi / 3.0)).epsilon(1e-12));
    CHECK(freent::log_ball_volume(2, 1, 2.0) ==
          doctest::Approx(std::log(8.0 * pi / 3.0) + 4.0 * std::log(2.0)).epsilon(1e-12));
    // tuple volume is the power of the single-matrix volume
    CHECK(freent::log_ball_volume(3, 4, 1.7) ==
          doctest::Approx(4.0 * freent::log_ball_volume(3, 1, 1.7)).epsilon(1e-12));
    // radius scaling adds n k^2 log R
    CHECK(freent::log_ball_volume(4, 2, 2.5) - freent::log_ball_volume(4, 2, 1.0) ==
          doctest::Approx(32.0 * std::log(2.5)).epsilon(1e-12));
}

TEST_CASE("gaussian normalizer") {
    const double pi = 3.14159265358979323846;
    // k=1, n=1: density (2 pi)^{-1/2} exp(-a^2/2)
    CHECK(freent::log_c_k(1, 1) == doctest::Approx(-0.5 * std::log(2.0 * pi)).epsilon(1e-12));
    // closed form (n k^2 / 2)(log k - log 2 pi)
    CHECK(freent::log_c_k(5, 3) ==
          doctest::Approx(0.5 * 3.0 * 25.0 * (std::log(5.0) - std::log(2.0 * pi))).epsilon(1e-12));
}

TEST_CASE("ball volume at k=3 against gaussian importance monte carlo") {
    // Independent generator and estimator: sample the gue density with
    // mt19937, weight hits by the inverse density.  log E[w 1_hit] should
    // reproduce the closed form within monte carlo error.
    const std::size_t k = 3, trials = 200000;
    const double R = 1.1;
    std::mt19937_64 gen(99);
    std::normal_distribution<double> nd(0.0, 1.0);
    const double sd = 1.0 / std::sqrt(double(k)), so = 1.0 / std::sqrt(2.0 * double(k));

    std::vector<double> logw;
    logw.reserve(trials / 4);
    for (std::size_t t = 0; t < trials; ++t) {
        freent::CMat m(k);
        double tr2 = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double d = sd * nd(gen);
            m.set(i, i, cd(d, 0));
            tr2 += d * d;
            for (std::size_t j = i + 1; j < k; ++j) {
                const cd v(so * nd(gen), so * nd(gen));
                m.set(i, j, v);
                m.set(j, i, std::conj(v));
                tr2 += 2.0 * std::norm(v);
            }
        }
        const HermitianMatrix h(m);
        if (freent::opnorm(h) <= R) logw.push_back(0.5 * double(k) * tr2);
    }
    REQUIRE(logw.size() > 500);
    const double mx = *std::max_element(logw.begin(), logw.end());
    double s1 = 0, s2 = 0;
    for (double w : logw) {
        const double e = std::exp(w - mx);
        s1 += e;
        s2 += e * e;
    }
    const double mean = s1 / double(trials);
    const double var = s2 / double(trials) - mean * mean;
    const double se = std::sqrt(var / double(trials)) / mean;
    const double est = mx + std::log(mean) - freent::log_c_k(k, 1);
    CHECK(std::abs(est - freent::log_ball_volume(k, 1, R)) <= 3.0 * se + 1e-3);
}

TEST_CASE("sample_tuple dispatches on the kind") {
    SamplerConfig cfg;
    cfg.k = 3;
    cfg.n = 2;
    cfg.seed = 21;
    cfg.kind = SamplerConfig::Kind::gue;
    const MatrixTuple g = freent::sample_tuple(cfg, 4);
    CHECK(identical(g[0], freent::sample_gue(3, 2, 21, 4)[0]));

    cfg.kind = SamplerConfig::Kind::ball;
    cfg.radius = 0.9;
    const MatrixTuple b = freent::sample_tuple(cfg, 4);
    CHECK(identical(b[0], freent::sample_ball(3, 2, 0.9, 21, 4)[0]));
    CHECK(freent::opnorm(b[1]) <= 0.9 + 1e-9);
}
