#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freent/matrix.hpp"
#include "freent/ncpoly.hpp"

namespace freent {

struct Constraint {
    NCPolynomial poly;
    double target;  // required operator norm of poly at the tuple, >= 0
};

// Norm-constrained microstate domain for (n + m)-tuples at matrix size k:
// tuples T with | ||P(T)|| - target | <= epsilon for every constraint
// (two-sided), or ||P(T)|| <= target + epsilon (one-sided, the "semi"
// domain).  radius_bound is the ambient norm box M used by trace windows
// and by the metric weights.
struct MicrostateSpec {
    std::size_t n = 1;   // presence generators
    std::size_t m = 0;   // auxiliary generators
    std::size_t k = 1;
    double epsilon = 0.1;
    double radius_bound = 1.0;
    std::vector<Constraint> constraints;

    std::size_t arity() const { return n + m; }
};

void validate(const MicrostateSpec& spec);

// Standard form: one coordinate constraint per generator (X_j with the given
// target), then the extras; radius_bound = max target + 2 * epsilon.
MicrostateSpec make_spec(std::size_t n, std::size_t m, std::size_t k, double epsilon,
                         const std::vector<double>& coordinate_targets,
                         const std::vector<Constraint>& extra = {});

MicrostateSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const MicrostateSpec& spec);

// Same constraints at another matrix size.
MicrostateSpec with_dimension(const MicrostateSpec& spec, std::size_t k);

// Constraints that mention only the presence generators X1..Xn, with the
// auxiliary variables dropped from the arity.
MicrostateSpec restrict_to_presence(const MicrostateSpec& spec);

bool is_microstate(const MicrostateSpec& spec, const MatrixTuple& t);
bool is_semi_microstate(const MicrostateSpec& spec, const MatrixTuple& t);

// First n components of the tuple.
MatrixTuple project_presence(const MatrixTuple& t, std::size_t n);

// Componentwise block diagonal sum; arities must match.
MatrixTuple direct_sum(const MatrixTuple& a, const MatrixTuple& b);

// Trace-window domain: normalized trace of every listed word within tol of
// its target, plus the norm box ||A_j|| <= radius_bound.
struct TraceSpec {
    std::size_t arity = 1;
    double tol = 0.1;
    double radius_bound = 1.0;
    std::map<Word, double> moments;
};

void validate(const TraceSpec& spec);
bool is_trace_microstate(const TraceSpec& spec, const MatrixTuple& t);

// Normalized trace of the word product; complex in general.
std::complex<double> word_trace(const MatrixTuple& t, const Word& w);

// sum_{p=1}^{p_max} (2 M d)^{-p} sum_{|w| = p} |tau_a(w) - tau_b(w)| over
// the words listed in either spec (missing moments count as zero), with
// d the common arity and M the larger radius bound.  The integral-metric
// tail beyond p_max is below 2^{1 - p_max}.
double tracestate_metric(const TraceSpec& a, const TraceSpec& b, std::size_t p_max = 20);

} // namespace freent
