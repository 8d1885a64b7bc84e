#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "freent/eigen.hpp"
#include "freent/errors.hpp"
#include "freent/ncpoly.hpp"
#include "oracles.hpp"

using freent::CMat;
using freent::HermitianMatrix;
using freent::MatrixTuple;
using freent::NCPolynomial;
using freent::ValidationError;
using cd = std::complex<double>;

namespace {

MatrixTuple random_tuple(std::mt19937_64& gen, std::size_t arity, std::size_t k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<HermitianMatrix> ms;
    for (std::size_t a = 0; a < arity; ++a) {
        CMat m(k);
        for (std::size_t i = 0; i < k; ++i) {
            m.set(i, i, cd(u(gen), 0));
            for (std::size_t j = i + 1; j < k; ++j) {
                const cd v(u(gen), u(gen));
                m.set(i, j, v);
                m.set(j, i, std::conj(v));
            }
        }
        ms.emplace_back(m);
    }
    return MatrixTuple(std::move(ms));
}

double max_abs_diff(const CMat& a, const CMat& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.k; ++i)
        for (std::size_t j = 0; j < a.k; ++j)
            worst = std::max(worst, std::abs(a.entry(i, j) - b.entry(i, j)));
    return worst;
}

}  // namespace

TEST_CASE("printing round-trips through the parser") {
    const std::vector<std::string> texts = {
        "X1",
        "X1*X2 - X2*X1",
        "2.5*X1*X1",
        "(0,1)*X2",
        "i*X1",
        "1 + X1",
        "-X1",
        "(1.5,-2)*X1*X2*X1",
        "X1*X1*X1 - 1.5*X1",
        "0.5*X1*X1 - 1",
        "3 - 2*X2 + X2*X2*X1",
    };
    for (const auto& t : texts) {
        const auto p = NCPolynomial::parse(t, 2);
        const auto q = NCPolynomial::parse(p.to_string(), 2);
        CHECK(p == q);
        CHECK(p.to_string() == q.to_string());
    }
}

TEST_CASE("parser rejects malformed input with a position") {
    auto message = [](const std::string& text, std::size_t arity) {
        try {
            NCPolynomial::parse(text, arity);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("X0", 2) != "");
    CHECK(message("X3", 2) != "");        // index above arity
    CHECK(message("X1**X2", 2) != "");
    CHECK(message("2.5.5*X1", 2) != "");
    CHECK(message("(1,2*X1", 2) != "");   // unbalanced parenthesis
    CHECK(message("", 2) != "");
    CHECK(message("X1 +", 2) != "");
    // the position shows up in the message
    CHECK(message("X1 * * X2", 2).find("position") != std::string::npos);
}

TEST_CASE("degree cap") {
    std::string long_word = "X1";
    for (int i = 0; i < 32; ++i) long_word += "*X1";  // 33 letters
    CHECK_THROWS_AS(NCPolynomial::parse(long_word, 1), ValidationError);
    std::string ok_word = "X1";
    for (int i = 0; i < 31; ++i) ok_word += "*X1";  // exactly max_degree
    CHECK(NCPolynomial::parse(ok_word, 1).degree() == NCPolynomial::max_degree);
}

TEST_CASE("canonical form merges and drops terms") {
    const auto p = NCPolynomial::parse("X1 + X1", 1);
    CHECK(p == NCPolynomial::coordinate(1, 1).scaled(2.0));
    const auto z = NCPolynomial::parse("X1 - X1", 1);
    CHECK(z.is_zero());
    CHECK(z == NCPolynomial::constant(1, 0.0));
    // commutator is nonzero as a free polynomial
    CHECK(!NCPolynomial::parse("X1*X2 - X2*X1", 2).is_zero());
}

TEST_CASE("adjoint reverses words and conjugates coefficients") {
    const auto p = NCPolynomial::parse("(1.5,-2)*X1*X2 + i*X1", 2);
    const auto q = p.adjoint();
    CHECK(q == NCPolynomial::parse("(1.5,2)*X2*X1 - i*X1", 2));
    CHECK(q.adjoint() == p);
    CHECK(NCPolynomial::coordinate(3, 2).adjoint() == NCPolynomial::coordinate(3, 2));
}

TEST_CASE("arithmetic matches evaluation") {
    std::mt19937_64 gen(31);
    const auto t = random_tuple(gen, 2, 4);
    const auto p = NCPolynomial::parse("X1*X2 - 2*X2", 2);
    const auto q = NCPolynomial::parse("i*X1 + X2*X2", 2);

    const CMat sum_direct = freent::eval(p + q, t);
    CMat sum_manual = freent::eval(p, t);
    {
        const CMat qv = freent::eval(q, t);
        for (std::size_t i = 0; i < 16; ++i) {
            sum_manual.re[i] += qv.re[i];
            sum_manual.im[i] += qv.im[i];
        }
    }
    CHECK(max_abs_diff(sum_direct, sum_manual) <= 1e-12);

    const CMat prod_direct = freent::eval(p * q, t);
    const CMat prod_manual = freent::cmul(freent::eval(p, t), freent::eval(q, t));
    CHECK(max_abs_diff(prod_direct, prod_manual) <= 1e-11);

    const CMat scaled = freent::eval(p.scaled(cd(0, 2)), t);
    const CMat base = freent::eval(p, t);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(scaled.entry(i, j) - cd(0, 2) * base.entry(i, j)) <= 1e-12);
}

TEST_CASE("evaluation hand check") {
    // t = (A, B) with A = diag(1, -1), B = [[0,1],[1,0]]
    const auto a = HermitianMatrix::diagonal({1.0, -1.0});
    CMat bm(2);
    bm.set(0, 1, cd(1, 0));
    bm.set(1, 0, cd(1, 0));
    const HermitianMatrix b(bm);
    const MatrixTuple t({a, b});

    const CMat ab = freent::eval(NCPolynomial::parse("X1*X2", 2), t);
    CHECK(ab.entry(0, 1) == cd(1, 0));
    CHECK(ab.entry(1, 0) == cd(-1, 0));
    CHECK(std::abs(ab.entry(0, 0)) == 0.0);

    // constant term adds the identity
    const CMat one_plus = freent::eval(NCPolynomial::parse("1 + X1", 2), t);
    CHECK(one_plus.entry(0, 0) == cd(2, 0));
    CHECK(one_plus.entry(1, 1) == cd(0, 0));

    // empty product convention: degree-0 polynomial evaluates to c*I
    const CMat c = freent::eval(NCPolynomial::constant(2, cd(3, -1)), t);
    CHECK(c.entry(1, 1) == cd(3, -1));
    CHECK(std::abs(c.entry(0, 1)) == 0.0);
}

TEST_CASE("eval rejects arity mismatch") {
    std::mt19937_64 gen(37);
    const auto t = random_tuple(gen, 1, 3);
    CHECK_THROWS_AS(freent::eval(NCPolynomial::parse("X1*X2", 2), t), ValidationError);
}

TEST_CASE("norms of evaluated polynomials") {
    std::mt19937_64 gen(41);
    const auto t = random_tuple(gen, 2, 5);

    // coordinate: the norm is the operator norm of the matrix itself
    CHECK(freent::poly_norm_at(NCPolynomial::coordinate(2, 1), t) ==
          doctest::Approx(freent::opnorm(t[0])).epsilon(1e-12));

    // Hermitian value: A^2 has norm ||A||^2
    const auto sq = NCPolynomial::parse("X1*X1", 2);
    CHECK(freent::poly_norm_at(sq, t) ==
          doctest::Approx(freent::opnorm(t[0]) * freent::opnorm(t[0])).epsilon(1e-10));

    // non-Hermitian value: compare against the singular value oracle
    const auto pq = NCPolynomial::parse("X1*X2", 2);
    const CMat v = freent::eval(pq, t);
    CHECK(v.herm_residual() > 1e-6);  // genuinely non-Hermitian input
    CHECK(freent::poly_norm_at(pq, t) ==
          doctest::Approx(oracle::sigma_max_power(oracle::to_dense_cmat(v), 5)).epsilon(1e-7));

    // norm is adjoint-invariant
    CHECK(freent::poly_norm_at(pq.adjoint(), t) ==
          doctest::Approx(freent::poly_norm_at(pq, t)).epsilon(1e-9));

    CHECK(freent::poly_norm_at(NCPolynomial::constant(2, cd(0, -2.5)), t) ==
          doctest::Approx(2.5));
}

TEST_CASE("format_double reparses to the same value") {
    const std::vector<double> vals = {0.0,   1.0,    0.5,     0.1,  1.0 / 3.0,
                                      -2.5,  1e-300, 1e300,   3.141592653589793,
                                      0.30000000000000004, 2.0 - 1.77 * std::pow(50.0, -2.0 / 3.0)};
    for (double v : vals) {
        const std::string s = freent::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(freent::format_double(0.5) == "0.5");
    CHECK(freent::format_double(1.0) == "1");
}
