#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "freent/microstates.hpp"

namespace freent {

enum class Metric { uniform, hs };

struct AcceptanceEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
};

struct VolumeEstimate {
    std::size_t k = 1;
    double raw_log_vol = 0.0;  // natural log of the estimated volume
    double normalized = 0.0;   // k^{-2} raw_log_vol + (n/2) log k
    double std_error = 0.0;    // on raw_log_vol
    std::size_t samples_used = 0;
    std::size_t hits = 0;
    std::string estimator;     // "ball_hit_rate" or "gaussian_importance"
    // Diagnostics surfaced into manifests: a ball estimate whose constraint
    // windows are not all inside the sampling ball measures vol(domain
    // intersected with the ball); a Gaussian estimate of a domain with an
    // unbounded coordinate diverges.
    bool containment = true;
    bool divergent = false;
    double sample_log_vol = 0.0;  // finite-sample value even when divergent
};

struct CoveringEstimate {
    std::size_t k = 1;
    double epsilon = 0.0;
    std::size_t net_size = 0;
    Metric metric = Metric::uniform;
    double normalized = 0.0;  // k^{-2} log net_size
    std::vector<std::size_t> centers;  // indices into the input point list
};

struct TracePinningReport {
    std::size_t k = 1;
    double epsilon = 0.0;
    std::size_t samples = 0;
    std::size_t accepted = 0;  // samples inside the one-variable preset
    std::vector<double> deltas;
    std::vector<double> fractions;  // accepted mass with |tau(A^2) - 1| < delta
    double mean_m2 = 0.0;
    double sd_m2 = 0.0;
    std::vector<double> m2_accepted;  // sample order
};

struct CoveringFitReport {
    std::size_t k = 1;
    double radius = 1.0;
    Metric metric = Metric::uniform;
    std::size_t samples = 0;
    std::vector<double> eps;
    std::vector<std::size_t> net_sizes;
    double slope = 0.0;      // d log(net size) / d log(R / eps)
    double slope_ratio = 0.0;  // slope / k^2
    bool slope_in_range = false;  // ratio within [0.7, 1.3]
    double c1 = 0.0, c2 = 0.0;    // net_size^{1/k^2} * eps / R extremes
};

struct DimensionCell {
    std::size_t k = 1;
    double epsilon = 0.0;
    std::size_t accepted = 0;
    std::size_t net_size = 0;
    double value = 0.0;  // k^{-2} log net_size
    bool resolved = false;
};

struct DimensionReport {
    double slope = 0.0;  // least-squares slope of D_eps against |log eps|
    std::vector<std::size_t> k_grid;
    std::vector<double> eps;
    std::vector<double> d_eps;      // max of resolved cell values per eps
    std::vector<bool> eps_resolved;
    std::vector<double> residuals;
    std::vector<DimensionCell> cells;
};

// Fraction of GUE tuples that satisfy the spec, with binomial error.
AcceptanceEstimate estimate_gamma_measure(const MicrostateSpec& spec,
                                          std::size_t samples, std::uint64_t seed,
                                          std::size_t workers = 1);

// Volume through the hit rate of exact uniform ball samples:
// log(hit fraction) + log_ball_volume.  Zero hits give -infinity with
// std_error infinity rather than an error.
VolumeEstimate estimate_volume_ball(const MicrostateSpec& spec, double R,
                                    std::size_t samples, std::uint64_t seed,
                                    std::size_t workers = 1);

// Volume through Gaussian importance weights exp((k/2) sum_j Tr A_j^2) of
// accepted GUE samples, normalized by the Gaussian constant.
VolumeEstimate estimate_volume_gaussian(const MicrostateSpec& spec,
                                        std::size_t samples, std::uint64_t seed,
                                        std::size_t workers = 1);

// (n/2) log(2 pi) - (n/2) (1 + delta)^2.
double semicircular_lower_bound(std::size_t n, double delta);

// Distribution of the normalized second moment over GUE samples accepted
// into the one-variable semicircular preset at window epsilon.
TracePinningReport trace_pinning_check(std::size_t k, double epsilon,
                                       std::size_t samples, std::uint64_t seed,
                                       std::size_t workers = 1);

// Covering net of the point list: farthest-point pass (first point start,
// ties to the lowest index) combined with a most-coverage pass on small
// inputs; the smaller net wins, so the size keeps the packing bound
// net_size <= N_{eps/2}.  Deterministic in the input order.
CoveringEstimate greedy_net(const std::vector<MatrixTuple>& points, double epsilon,
                            Metric metric);

// Net growth on dense uniform samples of the one-matrix ball of radius R:
// fits log(net size) against k^2 log(R/eps) and reports the implied
// covering constants.
CoveringFitReport ball_covering_bounds_check(std::size_t k, double R,
                                             const std::vector<double>& eps_list,
                                             std::size_t samples, std::uint64_t seed,
                                             Metric metric = Metric::uniform,
                                             std::size_t workers = 1);

// D_eps over a k-grid (max of resolved cells) and its slope in |log eps|.
// Cells with too few accepted samples, or whose net saturates on the sample
// count, are excluded.  The k-grid maximum stands in for a limsup and the
// family per experiment is fixed; callers record both in their manifests.
DimensionReport delta_top_estimate(
    const std::function<MicrostateSpec(std::size_t)>& spec_family,
    const std::vector<std::size_t>& k_grid, const std::vector<double>& eps_grid,
    double R, std::size_t samples_per_k, std::uint64_t seed,
    Metric metric = Metric::uniform, std::size_t workers = 1);

// One-variable presets.
MicrostateSpec semicircular_spec(std::size_t n, std::size_t k, double epsilon);
// Operator norm of c_1 X_1 + ... + c_n X_n in the semicircular family.
double semicircular_linear_norm(const std::vector<double>& coeffs);
// Spectrum pinned to [a, b] by Chebyshev polynomials of the interval up to
// the given degree (targets sup |T_j| = 1) plus the coordinate bound.
MicrostateSpec interval_spec(double a, double b, std::size_t k, double epsilon,
                             std::size_t degree = 3);
// No effective constraint: coordinate window [0, huge).
MicrostateSpec vacuous_spec(std::size_t n, std::size_t k);

} // namespace freent
