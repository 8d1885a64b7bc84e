#pragma once
#include <vector>

#include "freent/matrix.hpp"

namespace freent {

struct EigenH {
    std::vector<double> values;  // ascending
    CMat vectors;                // column j is the eigenvector for values[j]
};

// Cyclic Jacobi with element thresholding.  Stops when the off-diagonal
// Frobenius mass is <= 1e-12 * max(1, ||A||_F); the relative guard keeps the
// target above the rounding floor at large dimension.
std::vector<double> eigenvalues(const HermitianMatrix& m);
EigenH eigh(const HermitianMatrix& m);

double opnorm(const HermitianMatrix& m);

// Values-only solve of (M + M*)/2 without the construction-time residual
// check.  For matrices that are Hermitian up to accumulated product roundoff.
double opnorm_hermitian_part(const CMat& m);

// A = sum_j values[j] * u_j u_j*.
HermitianMatrix from_eigen(const EigenH& e);

} // namespace freent
