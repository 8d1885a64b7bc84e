#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "freent/eigen.hpp"
#include "freent/errors.hpp"
#include "freent/matrix.hpp"
#include "freent/microstates.hpp"
#include "oracles.hpp"

using freent::CMat;
using freent::EigenH;
using freent::HermitianMatrix;
using freent::MatrixTuple;
using freent::ValidationError;
using cd = std::complex<double>;

namespace {

HermitianMatrix random_herm(std::mt19937_64& gen, std::size_t k, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    CMat m(k);
    for (std::size_t i = 0; i < k; ++i) {
        m.set(i, i, cd(u(gen), 0.0));
        for (std::size_t j = i + 1; j < k; ++j) {
            const cd v(u(gen), u(gen));
            m.set(i, j, v);
            m.set(j, i, std::conj(v));
        }
    }
    return HermitianMatrix(m);
}

double recon_error(const HermitianMatrix& a, const EigenH& e) {
    const HermitianMatrix r = freent::from_eigen(e);
    double s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) s += std::norm(a.entry(i, j) - r.entry(i, j));
    return std::sqrt(s);
}

double orthonormality_error(const CMat& v) {
    const std::size_t k = v.k;
    double worst = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            cd dotp(0, 0);
            for (std::size_t i = 0; i < k; ++i)
                dotp += std::conj(v.entry(i, a)) * v.entry(i, b);
            worst = std::max(worst, std::abs(dotp - (a == b ? cd(1, 0) : cd(0, 0))));
        }
    return worst;
}

}  // namespace

TEST_CASE("hermitian construction symmetrizes and validates") {
    CMat m(2);
    m.set(0, 0, cd(1, 0));
    m.set(0, 1, cd(2, 3));
    m.set(1, 0, cd(2, -3));
    m.set(1, 1, cd(-4, 0));
    const HermitianMatrix h(m);
    CHECK(h.entry(0, 1) == cd(2, 3));
    CHECK(h.entry(1, 0) == cd(2, -3));
    CHECK(h.trace() == doctest::Approx(-3.0));
    CHECK(h.normalized_trace() == doctest::Approx(-1.5));

    CMat bad(2);
    bad.set(0, 1, cd(1, 0));
    bad.set(1, 0, cd(0.5, 0));  // far from conjugate-symmetric
    CHECK_THROWS_AS(HermitianMatrix{bad}, ValidationError);

    CHECK_THROWS_AS(HermitianMatrix::diagonal({}), ValidationError);
    CHECK_THROWS_AS(CMat{0}, ValidationError);
}

TEST_CASE("lincomb and operators act entrywise") {
    std::mt19937_64 gen(7);
    const auto a = random_herm(gen, 4), b = random_herm(gen, 4);
    const auto c = lincomb(2.0, a, -0.5, b);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(c.entry(i, j) - (2.0 * a.entry(i, j) - 0.5 * b.entry(i, j))) <=
                  1e-14);
    const auto s = a + b, d = a - b;
    CHECK(std::abs(s.entry(1, 2) - (a.entry(1, 2) + b.entry(1, 2))) <= 1e-14);
    CHECK(std::abs(d.entry(3, 0) - (a.entry(3, 0) - b.entry(3, 0))) <= 1e-14);
    CHECK(a.frob_norm() == doctest::Approx(std::sqrt(
        [&] { double t = 0; for (std::size_t i = 0; i < 4; ++i) for (std::size_t j = 0; j < 4; ++j) t += std::norm(a.entry(i, j)); return t; }())));
}

TEST_CASE("diagonal matrices eigensolve exactly") {
    const auto d = HermitianMatrix::diagonal({3.0, -1.0, 2.0, -7.5});
    const auto vals = freent::eigenvalues(d);
    CHECK(vals == std::vector<double>{-7.5, -1.0, 2.0, 3.0});
    CHECK(freent::opnorm(d) == doctest::Approx(7.5));
}

TEST_CASE("two by two closed form") {
    // [[1, 2-i], [2+i, -1]]: eigenvalues +-sqrt(1 + |2-i|^2) = +-sqrt(6)
    CMat m(2);
    m.set(0, 0, cd(1, 0));
    m.set(0, 1, cd(2, -1));
    m.set(1, 0, cd(2, 1));
    m.set(1, 1, cd(-1, 0));
    const auto vals = freent::eigenvalues(HermitianMatrix(m));
    CHECK(vals[0] == doctest::Approx(-std::sqrt(6.0)).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("random spectra: reconstruction, orthonormality, order, opnorm") {
    std::mt19937_64 gen(11);
    for (std::size_t k : {1u, 2u, 3u, 5u, 8u, 13u, 21u, 34u, 50u}) {
        const auto a = random_herm(gen, k);
        const EigenH e = freent::eigh(a);
        REQUIRE(e.values.size() == k);
        CHECK(std::is_sorted(e.values.begin(), e.values.end()));
        CHECK(recon_error(a, e) <= 1e-10 * (1.0 + a.frob_norm()));
        CHECK(orthonormality_error(e.vectors) <= 1e-10);

        const double on = freent::opnorm(a);
        CHECK(on == doctest::Approx(std::max(std::abs(e.values.front()),
                                             std::abs(e.values.back()))));
        // independent route: power iteration on the dense matrix
        CHECK(on == doctest::Approx(oracle::opnorm_power(a)).epsilon(1e-7));
    }
}

TEST_CASE("shift moves the whole spectrum") {
    std::mt19937_64 gen(13);
    const auto a = random_herm(gen, 9);
    const auto shifted = a + HermitianMatrix::diagonal(std::vector<double>(9, 2.5));
    const auto va = freent::eigenvalues(a), vs = freent::eigenvalues(shifted);
    for (std::size_t i = 0; i < 9; ++i)
        CHECK(vs[i] == doctest::Approx(va[i] + 2.5).epsilon(1e-11));
}

TEST_CASE("block direct sum has the merged spectrum") {
    std::mt19937_64 gen(17);
    const auto a = random_herm(gen, 5), b = random_herm(gen, 7);
    const MatrixTuple ab = freent::direct_sum(MatrixTuple({a}), MatrixTuple({b}));
    REQUIRE(ab.dim() == 12);
    auto expect = freent::eigenvalues(a);
    const auto vb = freent::eigenvalues(b);
    expect.insert(expect.end(), vb.begin(), vb.end());
    std::sort(expect.begin(), expect.end());
    const auto got = freent::eigenvalues(ab[0]);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-11));
}

TEST_CASE("product norms through the hermitian-part solver") {
    std::mt19937_64 gen(19);
    const auto a = random_herm(gen, 6);
    const CMat v = a.to_cmat();
    // V* V is Hermitian positive semidefinite with norm ||A||^2
    const CMat vv = freent::cmul(v.adjoint(), v);
    CHECK(vv.herm_residual() <= 1e-12 * (1.0 + vv.frob_norm()));
    const double n2 = freent::opnorm_hermitian_part(vv);
    CHECK(std::sqrt(n2) == doctest::Approx(freent::opnorm(a)).epsilon(1e-9));
}

TEST_CASE("cgemm_acc accumulates into the target") {
    std::mt19937_64 gen(23);
    const auto a = random_herm(gen, 4), b = random_herm(gen, 4);
    const CMat ca = a.to_cmat(), cb = b.to_cmat();
    CMat acc = freent::cmul(ca, cb);
    freent::cgemm_acc(ca, cb, acc);  // acc = 2 A B now
    const CMat once = freent::cmul(ca, cb);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(acc.entry(i, j) - 2.0 * once.entry(i, j)) <= 1e-12);
}

TEST_CASE("metrics: scaling, symmetry, mismatch rejection") {
    std::mt19937_64 gen(29);
    const auto a = random_herm(gen, 3), b = random_herm(gen, 3);
    const MatrixTuple ta({a}), tb({b});
    CHECK(freent::hs_metric(ta, ta) == 0.0);
    CHECK(freent::uniform_metric(ta, ta) == 0.0);
    CHECK(freent::hs_metric(ta, tb) == doctest::Approx(freent::hs_metric(tb, ta)));
    CHECK(freent::uniform_metric(ta, tb) ==
          doctest::Approx(freent::opnorm(a - b)).epsilon(1e-12));
    // normalized HS: distance of A to 0 is sqrt(tr(A^2)/k)
    const MatrixTuple z({HermitianMatrix::zero(3)});
    double tr2 = 0;
    for (double v : freent::eigenvalues(a)) tr2 += v * v;
    CHECK(freent::hs_metric(ta, z) == doctest::Approx(std::sqrt(tr2 / 3.0)));

    const MatrixTuple wrong({random_herm(gen, 4)});
    CHECK_THROWS_AS(freent::hs_metric(ta, wrong), ValidationError);
    CHECK_THROWS_AS(freent::uniform_metric(ta, wrong), ValidationError);
}

TEST_CASE("matrix json literals round-trip") {
    const auto h = freent::matrix_from_json_text("[[[0,0],[0,-1]],[[0,1],[0,0]]]");
    CHECK(h.entry(0, 1) == cd(0, -1));
    CHECK(h.entry(1, 0) == cd(0, 1));
    const auto again = freent::matrix_from_json_text(freent::matrix_to_json_text(h));
    CHECK(again.entry(0, 1) == h.entry(0, 1));
    CHECK_THROWS_AS(freent::matrix_from_json_text("[[1,2],[3]]"), ValidationError);
    CHECK_THROWS_AS(freent::matrix_from_json_text("not json"), ValidationError);

    const auto t = freent::tuple_from_json_text(
        "[[[[1,0],[0,0]],[[0,0],[2,0]]], [[[0,0],[0,1]],[[0,-1],[0,0]]]]");
    CHECK(t.arity() == 2);
    CHECK(t.dim() == 2);
}
