#pragma once
#include <cstddef>
#include <utility>
#include <vector>

namespace freent {

// Finite union of closed intervals plus finitely many isolated points.
// Construction sorts, merges overlapping intervals, absorbs points that lie
// inside intervals, and drops duplicates.
struct RealCompact {
    std::vector<std::pair<double, double>> intervals;  // nondegenerate, disjoint
    std::vector<double> points;                        // isolated atoms

    static RealCompact make(std::vector<std::pair<double, double>> intervals,
                            std::vector<double> points = {});
    bool has_interior() const { return !intervals.empty(); }
    double total_length() const;
};

// Probability measure carried by an ordered point set.  cell_width > 0 marks
// a grid measure (a weight is mass spread uniformly over a cell of that
// width); cell_width == 0 marks atoms.
struct DiscretizedMeasure {
    std::vector<double> points;   // strictly increasing
    std::vector<double> weights;  // nonnegative, sum 1 within 1e-12
    double cell_width = 0.0;

    static DiscretizedMeasure make(std::vector<double> points,
                                   std::vector<double> weights,
                                   double cell_width = 0.0);
};

// 3/4 + (1/2) log(2 pi): the additive constant linking energy to entropy.
double theta();

// Logarithmic energy integral of the measure: sum_{i != j} w_i w_j
// log|x_i - x_j| plus the exact uniform-cell self term w_i^2 (log h - 3/2).
// Atomic measures (cell_width == 0) give -infinity.
double log_energy(const DiscretizedMeasure& mu);

struct EquilibriumResult {
    DiscretizedMeasure measure;
    double robin;              // maximal energy value
    double fw_gap;             // final duality gap of the simplex solver
    std::size_t iterations;
    double potential_spread;   // max - min of the potential over the support
    bool polished;             // closed-form support solve improved the iterate
};

// Energy-maximizing probability measure on a grid over K (at least 50 cells
// per interval, about `gridsize` in total, 50 <= gridsize <= 8192).
// Conditional-gradient iteration with away steps, duality gap 1e-8 or 50000
// iterations, then a support-restricted stationarity solve when it helps.
EquilibriumResult equilibrium_measure(const RealCompact& K, std::size_t gridsize);

// exp(robin constant); 0 for a set with no interval part.
double capacity(const RealCompact& K, std::size_t gridsize = 2000);

// log_energy(mu) + theta.
double chi_one_var(const DiscretizedMeasure& mu);

// log capacity(K) + theta.
double kappa_one_var(const RealCompact& K, std::size_t gridsize = 2000);

// Density sqrt(4 v - (x - c)^2) / (2 pi v) discretized on `gridsize` cells.
DiscretizedMeasure semicircle_density(double center, double variance,
                                      std::size_t gridsize);

// Density 1 / (pi sqrt((x - a)(b - x))) discretized on `gridsize` cells.
DiscretizedMeasure arcsine_density(double a, double b, std::size_t gridsize);

} // namespace freent
