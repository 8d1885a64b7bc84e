#include "freent/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "freent/eigen.hpp"
#include "freent/errors.hpp"
#include "freent/parallel.hpp"
#include "freent/randmat.hpp"

namespace freent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_volume_caps(const MicrostateSpec& spec) {
    if (spec.k > 12)
        throw ValidationError("volume estimation is capped at k <= 12");
    if (spec.arity() * spec.k * spec.k > 300)
        throw ValidationError("volume estimation is capped at n*k^2 <= 300");
}

double tuple_distance(const MatrixTuple& a, const MatrixTuple& b, Metric metric) {
    return metric == Metric::hs ? hs_metric(a, b) : uniform_metric(a, b);
}

// True when every generator carries a coordinate window that fits in the
// sampling ball, which pins the whole domain inside it.
bool coordinate_windows_inside(const MicrostateSpec& spec, double R) {
    std::vector<bool> inside(spec.arity(), false);
    for (const auto& c : spec.constraints) {
        const auto& terms = c.poly.terms();
        if (terms.size() != 1) continue;
        const auto& [w, coeff] = *terms.begin();
        if (w.size() != 1 || coeff != std::complex<double>(1.0, 0.0)) continue;
        if (c.target + spec.epsilon <= R) inside[w[0]] = true;
    }
    return std::all_of(inside.begin(), inside.end(), [](bool b) { return b; });
}

double half_trace_square_sum(const MatrixTuple& t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < t.arity(); ++j) {
        const double f = t[j].frob_norm();
        acc += f * f;
    }
    return 0.5 * double(t.dim()) * acc;
}

} // namespace

AcceptanceEstimate estimate_gamma_measure(const MicrostateSpec& spec,
                                          std::size_t samples, std::uint64_t seed,
                                          std::size_t workers) {
    validate(spec);
    if (samples < 1) throw ValidationError("gamma measure: samples must be >= 1");
    std::vector<std::uint8_t> hit(samples, 0);
    parallel_over(samples, workers, [&](std::size_t i) {
        hit[i] = is_microstate(spec, sample_gue(spec.k, spec.arity(), seed, i)) ? 1 : 0;
    });
    AcceptanceEstimate est;
    est.samples = samples;
    for (auto h : hit) est.hits += h;
    est.probability = double(est.hits) / double(samples);
    est.std_error = std::sqrt(est.probability * (1.0 - est.probability) / double(samples));
    return est;
}

VolumeEstimate estimate_volume_ball(const MicrostateSpec& spec, double R,
                                    std::size_t samples, std::uint64_t seed,
                                    std::size_t workers) {
    validate(spec);
    check_volume_caps(spec);
    if (!(R > 0.0)) throw ValidationError("ball volume: R must be > 0");
    if (samples < 1) throw ValidationError("ball volume: samples must be >= 1");

    std::vector<std::uint8_t> hit(samples, 0);
    parallel_over(samples, workers, [&](std::size_t i) {
        hit[i] = is_microstate(spec, sample_ball(spec.k, spec.arity(), R, seed, i)) ? 1 : 0;
    });

    VolumeEstimate est;
    est.k = spec.k;
    est.samples_used = samples;
    est.estimator = "ball_hit_rate";
    est.containment = coordinate_windows_inside(spec, R);
    for (auto h : hit) est.hits += h;
    const double kk = double(spec.k);
    const double nn = double(spec.arity());
    if (est.hits == 0) {
        est.raw_log_vol = -kInf;
        est.normalized = -kInf;
        est.std_error = kInf;
    } else {
        const double p = double(est.hits) / double(samples);
        est.raw_log_vol = std::log(p) + log_ball_volume(spec.k, spec.arity(), R);
        est.normalized = est.raw_log_vol / (kk * kk) + 0.5 * nn * std::log(kk);
        est.std_error = std::sqrt((1.0 - p) / (p * double(samples)));
    }
    est.sample_log_vol = est.raw_log_vol;
    return est;
}

VolumeEstimate estimate_volume_gaussian(const MicrostateSpec& spec,
                                        std::size_t samples, std::uint64_t seed,
                                        std::size_t workers) {
    validate(spec);
    check_volume_caps(spec);
    if (samples < 1) throw ValidationError("gaussian volume: samples must be >= 1");

    std::vector<double> logw(samples, -kInf);
    parallel_over(samples, workers, [&](std::size_t i) {
        const MatrixTuple t = sample_gue(spec.k, spec.arity(), seed, i);
        if (is_microstate(spec, t)) logw[i] = half_trace_square_sum(t);
    });

    VolumeEstimate est;
    est.k = spec.k;
    est.samples_used = samples;
    est.estimator = "gaussian_importance";
    // A generator without a finite coordinate window leaves the domain
    // unbounded and the importance integral infinite.
    est.divergent = !coordinate_windows_inside(spec, 1e8);

    double mx = -kInf;
    for (double lw : logw) {
        if (lw > mx) mx = lw;
        if (lw > -kInf) ++est.hits;
    }

    const double kk = double(spec.k);
    const double nn = double(spec.arity());
    if (est.hits == 0) {
        est.sample_log_vol = -kInf;
        est.std_error = kInf;
    } else {
        double wsum = 0.0;
        for (double lw : logw)
            if (lw > -kInf) wsum += std::exp(lw - mx);
        const double mean_shifted = wsum / double(samples);
        double var = 0.0;
        for (double lw : logw) {
            const double w = (lw > -kInf) ? std::exp(lw - mx) : 0.0;
            var += (w - mean_shifted) * (w - mean_shifted);
        }
        var /= double(samples > 1 ? samples - 1 : 1);
        est.sample_log_vol =
            mx + std::log(wsum) - std::log(double(samples)) - log_c_k(spec.k, spec.arity());
        est.std_error = std::sqrt(var / double(samples)) / mean_shifted;
    }

    if (est.divergent) {
        est.raw_log_vol = kInf;
        est.normalized = kInf;
        est.std_error = kInf;
    } else {
        est.raw_log_vol = est.sample_log_vol;
        est.normalized = est.raw_log_vol / (kk * kk) + 0.5 * nn * std::log(kk);
    }
    return est;
}

double semicircular_lower_bound(std::size_t n, double delta) {
    if (n < 1) throw ValidationError("lower bound: n must be >= 1");
    if (!(delta >= 0.0)) throw ValidationError("lower bound: delta must be >= 0");
    const double half_n = 0.5 * double(n);
    return half_n * std::log(2.0 * M_PI) - half_n * (1.0 + delta) * (1.0 + delta);
}

TracePinningReport trace_pinning_check(std::size_t k, double epsilon,
                                       std::size_t samples, std::uint64_t seed,
                                       std::size_t workers) {
    if (samples < 1) throw ValidationError("trace pinning: samples must be >= 1");
    const MicrostateSpec spec = semicircular_spec(1, k, epsilon);

    std::vector<std::uint8_t> acc(samples, 0);
    std::vector<double> m2(samples, 0.0);
    parallel_over(samples, workers, [&](std::size_t i) {
        const MatrixTuple t = sample_gue(k, 1, seed, i);
        acc[i] = is_microstate(spec, t) ? 1 : 0;
        const double f = t[0].frob_norm();
        m2[i] = f * f / double(k);
    });

    TracePinningReport rep;
    rep.k = k;
    rep.epsilon = epsilon;
    rep.samples = samples;
    rep.deltas = {0.05, 0.1, 0.2};
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        if (!acc[i]) continue;
        ++rep.accepted;
        rep.m2_accepted.push_back(m2[i]);
        sum += m2[i];
        sumsq += m2[i] * m2[i];
    }
    for (double d : rep.deltas) {
        std::size_t inside = 0;
        for (std::size_t i = 0; i < samples; ++i)
            if (acc[i] && std::abs(m2[i] - 1.0) < d) ++inside;
        rep.fractions.push_back(rep.accepted ? double(inside) / double(rep.accepted) : 0.0);
    }
    if (rep.accepted) {
        rep.mean_m2 = sum / double(rep.accepted);
        if (rep.accepted > 1) {
            const double v =
                (sumsq - sum * sum / double(rep.accepted)) / double(rep.accepted - 1);
            rep.sd_m2 = std::sqrt(std::max(0.0, v));
        }
    }
    return rep;
}

namespace {

constexpr std::size_t coverage_pass_cap = 6000;

// Closed-ball adjacency as bitset rows; the diagonal is set.
std::vector<std::vector<std::uint64_t>> adjacency(const std::vector<MatrixTuple>& pts,
                                                  double eps, Metric metric) {
    const std::size_t s = pts.size();
    const std::size_t words = (s + 63) / 64;
    std::vector<std::vector<std::uint64_t>> adj(s, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < s; ++i) {
        adj[i][i / 64] |= std::uint64_t(1) << (i % 64);
        for (std::size_t j = i + 1; j < s; ++j) {
            if (tuple_distance(pts[i], pts[j], metric) <= eps) {
                adj[i][j / 64] |= std::uint64_t(1) << (j % 64);
                adj[j][i / 64] |= std::uint64_t(1) << (i % 64);
            }
        }
    }
    return adj;
}

std::vector<std::size_t> farthest_point_net(const std::vector<MatrixTuple>& pts,
                                            double eps, Metric metric) {
    const std::size_t s = pts.size();
    std::vector<std::size_t> centers{0};
    std::vector<double> dist(s);
    for (std::size_t i = 0; i < s; ++i) dist[i] = tuple_distance(pts[i], pts[0], metric);
    while (true) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < s; ++i)
            if (dist[i] > dist[far]) far = i;
        if (dist[far] <= eps) break;
        centers.push_back(far);
        for (std::size_t i = 0; i < s; ++i)
            dist[i] = std::min(dist[i], tuple_distance(pts[i], pts[far], metric));
    }
    return centers;
}

std::vector<std::size_t> coverage_net(const std::vector<std::vector<std::uint64_t>>& adj) {
    const std::size_t s = adj.size();
    const std::size_t words = adj.empty() ? 0 : adj[0].size();
    std::vector<std::uint64_t> uncovered(words, ~std::uint64_t(0));
    if (s % 64) uncovered[words - 1] = (std::uint64_t(1) << (s % 64)) - 1;
    std::vector<std::size_t> centers;
    auto any_uncovered = [&] {
        for (auto w : uncovered)
            if (w) return true;
        return false;
    };
    while (any_uncovered()) {
        std::size_t best = 0, best_count = 0;
        for (std::size_t i = 0; i < s; ++i) {
            std::size_t cnt = 0;
            for (std::size_t w = 0; w < words; ++w)
                cnt += std::size_t(std::popcount(adj[i][w] & uncovered[w]));
            if (cnt > best_count) { best_count = cnt; best = i; }
        }
        if (best_count == 0) break;  // cannot happen: diagonals are set
        centers.push_back(best);
        for (std::size_t w = 0; w < words; ++w) uncovered[w] &= ~adj[best][w];
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

} // namespace

CoveringEstimate greedy_net(const std::vector<MatrixTuple>& points, double epsilon,
                            Metric metric) {
    if (points.empty()) throw ValidationError("greedy_net: empty point list");
    if (!(epsilon > 0.0)) throw ValidationError("greedy_net: epsilon must be > 0");
    for (const auto& p : points)
        if (p.dim() != points[0].dim() || p.arity() != points[0].arity())
            throw ValidationError("greedy_net: points must share dimension and arity");

    std::vector<std::size_t> centers = farthest_point_net(points, epsilon, metric);
    if (points.size() <= coverage_pass_cap) {
        const auto adj = adjacency(points, epsilon, metric);
        auto cov = coverage_net(adj);
        if (cov.size() < centers.size()) centers = std::move(cov);
    }

    CoveringEstimate est;
    est.k = points[0].dim();
    est.epsilon = epsilon;
    est.metric = metric;
    est.net_size = centers.size();
    est.centers = std::move(centers);
    const double kk = double(est.k);
    est.normalized = std::log(double(est.net_size)) / (kk * kk);
    return est;
}

CoveringFitReport ball_covering_bounds_check(std::size_t k, double R,
                                             const std::vector<double>& eps_list,
                                             std::size_t samples, std::uint64_t seed,
                                             Metric metric, std::size_t workers) {
    if (eps_list.size() < 2)
        throw ValidationError("covering check: need at least two epsilon values");
    for (double e : eps_list)
        if (!(e > 0.0) || e > R)
            throw ValidationError("covering check: each epsilon must lie in (0, R]");
    if (samples < 2) throw ValidationError("covering check: need at least two samples");

    std::vector<MatrixTuple> pts(samples, MatrixTuple{});
    parallel_over(samples, workers, [&](std::size_t i) {
        pts[i] = sample_ball(k, 1, R, seed, i);
    });

    CoveringFitReport rep;
    rep.k = k;
    rep.radius = R;
    rep.metric = metric;
    rep.samples = samples;
    rep.eps = eps_list;
    for (double e : eps_list)
        rep.net_sizes.push_back(greedy_net(pts, e, metric).net_size);

    const double kk2 = double(k) * double(k);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t used = 0;
    rep.c1 = kInf;
    rep.c2 = 0.0;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double frac = double(rep.net_sizes[i]) / double(samples);
        const double cval =
            std::exp(std::log(double(rep.net_sizes[i])) / kk2) * eps_list[i] / R;
        rep.c1 = std::min(rep.c1, cval);
        rep.c2 = std::max(rep.c2, cval);
        if (frac > 0.35) continue;  // net saturated on the sample count
        const double x = kk2 * std::log(R / eps_list[i]);
        const double y = std::log(double(rep.net_sizes[i]));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++used;
    }
    if (used < 2)
        throw NumericError("covering check: fewer than two unsaturated epsilon levels");
    const double denom = double(used) * sxx - sx * sx;
    if (std::abs(denom) > 1e-30) {
        const double a = (double(used) * sxy - sx * sy) / denom;
        rep.slope = a * kk2;
        rep.slope_ratio = a;
        rep.slope_in_range = a >= 0.7 && a <= 1.3;
    }
    return rep;
}

DimensionReport delta_top_estimate(
    const std::function<MicrostateSpec(std::size_t)>& spec_family,
    const std::vector<std::size_t>& k_grid, const std::vector<double>& eps_grid,
    double R, std::size_t samples_per_k, std::uint64_t seed, Metric metric,
    std::size_t workers) {
    if (k_grid.empty()) throw ValidationError("dimension estimate: empty k grid");
    if (eps_grid.size() < 3)
        throw ValidationError("dimension estimate: need at least 3 epsilon values");
    for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i + 1]))
            throw ValidationError("dimension estimate: epsilon grid must decrease");
    if (!(eps_grid.back() > 0.0))
        throw ValidationError("dimension estimate: epsilon values must be > 0");
    if (!(R > 0.0)) throw ValidationError("dimension estimate: R must be > 0");
    if (samples_per_k < 1) throw ValidationError("dimension estimate: samples must be >= 1");

    DimensionReport rep;
    rep.k_grid = k_grid;
    rep.eps = eps_grid;

    for (std::size_t k : k_grid) {
        const MicrostateSpec spec = spec_family(k);
        validate(spec);
        if (spec.k != k)
            throw ValidationError("dimension estimate: family returned a spec for the wrong k");

        std::vector<std::uint8_t> ok(samples_per_k, 0);
        std::vector<MatrixTuple> all(samples_per_k, MatrixTuple{});
        parallel_over(samples_per_k, workers, [&](std::size_t i) {
            all[i] = sample_ball(k, spec.arity(), R, seed, i);
            ok[i] = is_microstate(spec, all[i]) ? 1 : 0;
        });
        std::vector<MatrixTuple> accepted;
        for (std::size_t i = 0; i < samples_per_k; ++i)
            if (ok[i]) accepted.push_back(std::move(all[i]));

        for (double e : eps_grid) {
            DimensionCell cell;
            cell.k = k;
            cell.epsilon = e;
            cell.accepted = accepted.size();
            if (!accepted.empty()) {
                const auto net = greedy_net(accepted, e, metric);
                cell.net_size = net.net_size;
                cell.value = net.normalized;
                // A net that uses a large share of the accepted points has
                // run out of sample resolution at this epsilon.
                cell.resolved = accepted.size() >= 32 &&
                                double(cell.net_size) <= 0.35 * double(accepted.size());
            }
            rep.cells.push_back(cell);
        }
    }

    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        double best = -kInf;
        bool any = false;
        for (std::size_t c = 0; c < rep.cells.size(); ++c) {
            if (rep.cells[c].epsilon != eps_grid[e] || !rep.cells[c].resolved) continue;
            best = std::max(best, rep.cells[c].value);
            any = true;
        }
        rep.d_eps.push_back(any ? best : 0.0);
        rep.eps_resolved.push_back(any);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t used = 0;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        if (!rep.eps_resolved[e]) continue;
        const double x = std::abs(std::log(eps_grid[e]));
        const double y = rep.d_eps[e];
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++used;
    }
    if (used < 2)
        throw NumericError("dimension estimate: fewer than two resolved epsilon levels");
    const double denom = double(used) * sxx - sx * sx;
    if (std::abs(denom) <= 1e-30)
        throw NumericError("dimension estimate: degenerate epsilon grid");
    rep.slope = (double(used) * sxy - sx * sy) / denom;
    const double intercept = (sy - rep.slope * sx) / double(used);
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        if (!rep.eps_resolved[e]) {
            rep.residuals.push_back(0.0);
            continue;
        }
        const double x = std::abs(std::log(eps_grid[e]));
        rep.residuals.push_back(rep.d_eps[e] - (rep.slope * x + intercept));
    }
    return rep;
}

MicrostateSpec semicircular_spec(std::size_t n, std::size_t k, double epsilon) {
    return make_spec(n, 0, k, epsilon, std::vector<double>(n, 2.0));
}

double semicircular_linear_norm(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw ValidationError("linear norm: empty coefficient vector");
    double ss = 0.0;
    for (double c : coeffs) ss += c * c;
    return 2.0 * std::sqrt(ss);
}

MicrostateSpec interval_spec(double a, double b, std::size_t k, double epsilon,
                             std::size_t degree) {
    if (!(a < b)) throw ValidationError("interval preset: requires a < b");
    if (degree < 1 || degree > 10)
        throw ValidationError("interval preset: degree must lie in [1, 10]");
    // Chebyshev polynomials of the interval: T_j((2x - (a+b)) / (b-a)), each
    // with sup norm 1 on the spectrum.
    const NCPolynomial x = NCPolynomial::coordinate(1, 1);
    const NCPolynomial u =
        (x.scaled(2.0) - NCPolynomial::constant(1, a + b)).scaled(1.0 / (b - a));
    std::vector<Constraint> extras;
    NCPolynomial tprev = NCPolynomial::constant(1, 1.0);
    NCPolynomial tcur = u;
    for (std::size_t j = 1; j <= degree; ++j) {
        extras.push_back({tcur, 1.0});
        const NCPolynomial tnext = (u * tcur).scaled(2.0) - tprev;
        tprev = tcur;
        tcur = tnext;
    }
    return make_spec(1, 0, k, epsilon, {std::max(std::abs(a), std::abs(b))}, extras);
}

MicrostateSpec vacuous_spec(std::size_t n, std::size_t k) {
    return make_spec(n, 0, k, 1e9, std::vector<double>(n, 0.0));
}

} // namespace freent
