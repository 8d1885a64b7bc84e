#pragma once
#include <cstdint>

#include "freent/matrix.hpp"

namespace freent {

// Volumes and densities on the space of k x k self-adjoint matrices use the
// Lebesgue measure of the trace inner product <A,B> = Tr(AB): orthonormal
// coordinates are the diagonal entries together with sqrt(2) * Re and
// sqrt(2) * Im of each strictly upper entry.  Every constant and estimator
// in the library sticks to this one convention.

struct SamplerConfig {
    enum class Kind { gue, ball };
    std::size_t k = 1;       // matrix dimension
    std::size_t n = 1;       // tuple arity
    std::uint64_t seed = 0;
    Kind kind = Kind::gue;
    double radius = 1.0;     // ball kind only: operator-norm bound
};

void validate(const SamplerConfig& cfg);

// Tuple number `index` of the stream determined by cfg.  Pure in
// (cfg, index): the same arguments give bit-identical output on any worker.
MatrixTuple sample_tuple(const SamplerConfig& cfg, std::uint64_t index);

// n independent GUE(k) matrices: diagonal N(0, 1/k), off-diagonal real and
// imaginary parts N(0, 1/(2k)).
MatrixTuple sample_gue(std::size_t k, std::size_t n, std::uint64_t seed,
                       std::uint64_t index);

// Exactly uniform draw from {A : opnorm(A) <= R}^n.  Eigenvalues are drawn
// by rejection against the squared Vandermonde bound attained at the
// Gauss-Lobatto points, then conjugated by an independent Haar unitary.
// Capped at k <= 12, where rejection is still practical.
MatrixTuple sample_ball(std::size_t k, std::size_t n, double R,
                        std::uint64_t seed, std::uint64_t index);

// log of (2 pi)^{-n k^2 / 2} k^{n k^2 / 2}, the normalizer that makes
// exp(-(k/2) sum_j Tr A_j^2) a probability density for n-tuples.
double log_c_k(std::size_t k, std::size_t n);

// log volume of {opnorm <= R}^n, from the closed-form eigenvalue integral
//   vol = (2 pi)^{k(k-1)/2} / (k! prod_{j<k} j!) * S_k * R^{k^2},
//   S_k = 2^{k^2} prod_{j=0}^{k-1} j!^2 (j+1)! / (k+j)!.
double log_ball_volume(std::size_t k, std::size_t n, double R);

} // namespace freent
