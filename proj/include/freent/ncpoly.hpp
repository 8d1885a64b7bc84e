#pragma once
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freent/matrix.hpp"

namespace freent {

// Word in the free monoid on X1..Xn, stored as 0-based indices.
using Word = std::vector<std::uint32_t>;

// Noncommutative *-polynomial with complex coefficients.  Terms are kept in
// a canonical map (lexicographic word order, exact zeros dropped), so equal
// polynomials compare equal and printing is deterministic.
class NCPolynomial {
public:
    static constexpr std::size_t max_degree = 32;

    // Text form, e.g. "X1*X2 - X2*X1", "2.5*X1*X1", "(0,1)*X2", "i*X1".
    // Whitespace is insignificant.  Rejects syntax errors (with position),
    // variable indices outside [1, arity], and words longer than max_degree.
    static NCPolynomial parse(const std::string& text, std::size_t arity);

    static NCPolynomial coordinate(std::size_t arity, std::size_t var_index_1based);
    static NCPolynomial constant(std::size_t arity, std::complex<double> c);

    std::size_t arity() const { return arity_; }
    std::size_t degree() const;
    bool is_zero() const { return terms_.empty(); }
    const std::map<Word, std::complex<double>>& terms() const { return terms_; }

    // Reverses every word and conjugates every coefficient.
    NCPolynomial adjoint() const;

    NCPolynomial operator+(const NCPolynomial& o) const;
    NCPolynomial operator-(const NCPolynomial& o) const;
    NCPolynomial operator*(const NCPolynomial& o) const;
    NCPolynomial scaled(std::complex<double> c) const;
    bool operator==(const NCPolynomial& o) const {
        return arity_ == o.arity_ && terms_ == o.terms_;
    }

    std::string to_string() const;

private:
    NCPolynomial(std::size_t arity, std::map<Word, std::complex<double>> terms);
    std::size_t arity_ = 0;
    std::map<Word, std::complex<double>> terms_;
};

// Substitutes t into p.  The tuple arity must equal the polynomial arity;
// the empty word evaluates to the identity.
CMat eval(const NCPolynomial& p, const MatrixTuple& t);

// Operator norm of eval(p, t): direct eigensolve when the value is Hermitian
// up to roundoff, otherwise sqrt(opnorm(V* V)).
double poly_norm_at(const NCPolynomial& p, const MatrixTuple& t);

// Shortest decimal form that reparses to the same double.
std::string format_double(double v);

} // namespace freent
