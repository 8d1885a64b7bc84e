#include "freent/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freent/errors.hpp"
#include "freent/kernels.hpp"

namespace freent {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t grid_min = 50;
constexpr std::size_t grid_max = 8192;  // bounds the dense N^2 kernel
} // namespace

RealCompact RealCompact::make(std::vector<std::pair<double, double>> intervals,
                              std::vector<double> points) {
    for (auto& [a, b] : intervals) {
        if (!std::isfinite(a) || !std::isfinite(b) || a > b)
            throw ValidationError("real compact set: interval endpoints must satisfy a <= b");
        if (a == b) points.push_back(a);
    }
    std::erase_if(intervals, [](const auto& iv) { return iv.first == iv.second; });
    std::sort(intervals.begin(), intervals.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, iv.second);
        else
            merged.push_back(iv);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::erase_if(points, [&](double p) {
        if (!std::isfinite(p)) throw ValidationError("real compact set: point must be finite");
        for (const auto& [a, b] : merged)
            if (p >= a && p <= b) return true;
        return false;
    });
    RealCompact k;
    k.intervals = std::move(merged);
    k.points = std::move(points);
    if (k.intervals.empty() && k.points.empty())
        throw ValidationError("real compact set: must be non-empty");
    return k;
}

double RealCompact::total_length() const {
    double len = 0.0;
    for (const auto& [a, b] : intervals) len += b - a;
    return len;
}

DiscretizedMeasure DiscretizedMeasure::make(std::vector<double> points,
                                            std::vector<double> weights,
                                            double cell_width) {
    if (points.empty() || points.size() != weights.size())
        throw ValidationError("measure: points and weights must be non-empty and equal length");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw ValidationError("measure: points must be strictly increasing");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ValidationError("measure: weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("measure: weights must sum to 1 within 1e-12");
    if (cell_width < 0.0) throw ValidationError("measure: cell width must be >= 0");
    DiscretizedMeasure mu;
    mu.points = std::move(points);
    mu.weights = std::move(weights);
    mu.cell_width = cell_width;
    return mu;
}

double theta() { return 0.75 + 0.5 * std::log(2.0 * M_PI); }

double log_energy(const DiscretizedMeasure& mu) {
    const std::size_t n = mu.points.size();
    if (mu.cell_width == 0.0) {
        for (double w : mu.weights)
            if (w > 0.0) return -kInf;
    }
    const double self = std::log(mu.cell_width) - 1.5;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mu.weights[i] == 0.0) continue;
        acc += mu.weights[i] * mu.weights[i] * self;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (mu.weights[j] == 0.0) continue;
            acc += 2.0 * mu.weights[i] * mu.weights[j] *
                   std::log(mu.points[j] - mu.points[i]);
        }
    }
    return acc;
}

namespace {

struct Grid {
    std::vector<double> mid;
    std::vector<double> width;
};

Grid build_grid(const RealCompact& K, std::size_t gridsize) {
    if (!K.has_interior())
        throw ValidationError("equilibrium measure needs at least one interval");
    if (gridsize < grid_min || gridsize > grid_max)
        throw ValidationError("gridsize must lie in [50, 8192]");
    const double total = K.total_length();
    Grid g;
    for (const auto& [a, b] : K.intervals) {
        const double len = b - a;
        const std::size_t cells =
            std::max(grid_min, std::size_t(std::llround(double(gridsize) * len / total)));
        const double h = len / double(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            g.mid.push_back(a + (double(i) + 0.5) * h);
            g.width.push_back(h);
        }
    }
    return g;
}

// Dense symmetric kernel: log distance off the diagonal, exact uniform-cell
// self energy on it.
std::vector<double> assemble(const Grid& g) {
    const std::size_t n = g.mid.size();
    std::vector<double> A(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        A[i * n + i] = std::log(g.width[i]) - 1.5;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::log(std::abs(g.mid[i] - g.mid[j]));
            A[i * n + j] = v;
            A[j * n + i] = v;
        }
    }
    return A;
}

struct FwState {
    std::vector<double> w, g;  // iterate and gradient 2 A w
    double gap = kInf;
    std::size_t iterations = 0;
};

void refresh_gradient(const std::vector<double>& A, FwState& st) {
    const std::size_t n = st.w.size();
    const auto& kn = kern::ops();
    for (std::size_t i = 0; i < n; ++i)
        st.g[i] = 2.0 * kn.dot(A.data() + i * n, st.w.data(), n);
}

double fw_gap(const FwState& st) {
    const auto& kn = kern::ops();
    const double gw = kn.dot(st.g.data(), st.w.data(), st.w.size());
    return *std::max_element(st.g.begin(), st.g.end()) - gw;
}

struct StepChoice {
    double gw, fhat, gap_fw, gap_aw;
    std::size_t s, a;
};

StepChoice choose_step(const FwState& st) {
    const auto& kn = kern::ops();
    const std::size_t n = st.w.size();
    StepChoice c{};
    c.gw = kn.dot(st.g.data(), st.w.data(), n);
    c.fhat = 0.5 * c.gw;
    c.s = 0;
    c.a = 0;
    double gs = -kInf, ga = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (st.g[i] > gs) { gs = st.g[i]; c.s = i; }
        if (st.w[i] > 0.0 && st.g[i] < ga) { ga = st.g[i]; c.a = i; }
    }
    c.gap_fw = gs - c.gw;
    c.gap_aw = c.gw - ga;
    return c;
}

// Conditional gradient with away steps and exact line search on the simplex,
// maximizing w^T A w.
FwState run_fw(const std::vector<double>& A, std::size_t n) {
    const auto& kn = kern::ops();
    FwState st;
    st.w.assign(n, 1.0 / double(n));
    st.g.assign(n, 0.0);
    refresh_gradient(A, st);

    constexpr std::size_t max_iters = 50000;
    constexpr double gap_tol = 1e-8;
    constexpr std::size_t refresh_every = 1024;

    for (std::size_t it = 0; it < max_iters; ++it) {
        if (it % refresh_every == 0) {
            refresh_gradient(A, st);
            st.gap = fw_gap(st);
            if (st.gap <= gap_tol) { st.iterations = it; return st; }
        }
        StepChoice c = choose_step(st);
        if (c.gap_fw <= gap_tol && c.gap_aw <= gap_tol) {
            // The incrementally tracked gradient says we are done; confirm
            // against a fresh one, which either stops or reopens a gap.
            refresh_gradient(A, st);
            st.gap = fw_gap(st);
            st.iterations = it;
            if (st.gap <= gap_tol) return st;
            c = choose_step(st);
        }
        st.iterations = it + 1;

        if (c.gap_fw >= c.gap_aw) {
            // Toward vertex s: d = e_s - w, so d'Ad = A_ss - fhat - gap.
            const double q = A[c.s * n + c.s] - c.fhat - c.gap_fw;
            double gamma = 1.0;
            if (q < 0.0) gamma = std::min(1.0, c.gap_fw / (-2.0 * q));
            if (gamma <= 0.0) continue;
            kn.axpby(0.0, st.w.data(), 1.0 - gamma, st.w.data(), n);
            st.w[c.s] += gamma;
            kn.axpby(2.0 * gamma, A.data() + c.s * n, 1.0 - gamma, st.g.data(), n);
        } else {
            // Away from vertex a: d = w - e_a, so d'Ad = A_aa - fhat + gap.
            if (st.w[c.a] >= 1.0) continue;
            const double q = A[c.a * n + c.a] - c.fhat + c.gap_aw;
            const double gmax = st.w[c.a] / (1.0 - st.w[c.a]);
            double gamma = gmax;
            if (q < 0.0) gamma = std::min(gmax, c.gap_aw / (-2.0 * q));
            if (gamma <= 0.0) continue;
            kn.axpby(0.0, st.w.data(), 1.0 + gamma, st.w.data(), n);
            st.w[c.a] = (gamma >= gmax) ? 0.0 : std::max(0.0, st.w[c.a] - gamma);
            kn.axpby(-2.0 * gamma, A.data() + c.a * n, 1.0 + gamma, st.g.data(), n);
        }
    }
    refresh_gradient(A, st);
    st.gap = fw_gap(st);
    st.iterations = max_iters;
    return st;
}

// Stationarity on a fixed support: 2 A_SS w_S = lambda 1 with sum w = 1,
// solved through a Cholesky factor of -A_SS; negative entries shrink the
// support and the solve repeats.
bool kkt_polish(const std::vector<double>& A, std::size_t n, std::vector<double>& w) {
    const auto& kn = kern::ops();
    std::vector<std::size_t> sup;
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] > 1e-10) sup.push_back(i);

    for (int round = 0; round < 60 && sup.size() >= 2; ++round) {
        const std::size_t m = sup.size();
        std::vector<double> L(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                L[i * m + j] = -A[sup[i] * n + sup[j]];
        bool ok = true;
        for (std::size_t j = 0; j < m && ok; ++j) {
            double d = L[j * m + j] - kn.sum_sq(L.data() + j * m, j);
            if (d <= 0.0) { ok = false; break; }
            d = std::sqrt(d);
            L[j * m + j] = d;
            for (std::size_t i = j + 1; i < m; ++i)
                L[i * m + j] =
                    (L[i * m + j] - kn.dot(L.data() + i * m, L.data() + j * m, j)) / d;
        }
        if (!ok) return false;

        // Solve -A_SS x = 1; w_S proportional to x.
        std::vector<double> x(m, 1.0);
        for (std::size_t i = 0; i < m; ++i)
            x[i] = (1.0 - kn.dot(L.data() + i * m, x.data(), i)) / L[i * m + i];
        for (std::size_t ii = m; ii-- > 0;) {
            double acc = x[ii];
            for (std::size_t j = ii + 1; j < m; ++j) acc -= L[j * m + ii] * x[j];
            x[ii] = acc / L[ii * m + ii];
        }
        double sum = 0.0;
        for (double v : x) sum += v;
        if (!(sum > 0.0)) return false;

        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < m; ++i)
            if (x[i] > 0.0) pos.push_back(sup[i]);
        if (pos.size() == m) {
            std::fill(w.begin(), w.end(), 0.0);
            for (std::size_t i = 0; i < m; ++i) w[sup[i]] = x[i] / sum;
            return true;
        }
        if (pos.size() < 2) return false;
        sup = std::move(pos);
    }
    return false;
}

double quad_value(const std::vector<double>& A, const std::vector<double>& w) {
    const std::size_t n = w.size();
    const auto& kn = kern::ops();
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        f += w[i] * kn.dot(A.data() + i * n, w.data(), n);
    }
    return f;
}

} // namespace

EquilibriumResult equilibrium_measure(const RealCompact& K, std::size_t gridsize) {
    const Grid grid = build_grid(K, gridsize);
    const std::size_t n = grid.mid.size();
    const std::vector<double> A = assemble(grid);

    FwState st = run_fw(A, n);
    double f_fw = quad_value(A, st.w);

    bool polished = false;
    std::vector<double> w_try = st.w;
    if (kkt_polish(A, n, w_try)) {
        const double f_try = quad_value(A, w_try);
        if (f_try >= f_fw - 1e-12 * std::abs(f_fw)) {
            FwState check;
            check.w = w_try;
            check.g.assign(n, 0.0);
            refresh_gradient(A, check);
            const double gap_try = fw_gap(check);
            if (gap_try <= st.gap || f_try > f_fw) {
                st.w = std::move(w_try);
                st.g = std::move(check.g);
                st.gap = gap_try;
                f_fw = f_try;
                polished = true;
            }
        }
    }

    double wmax = 0.0;
    for (double v : st.w) wmax = std::max(wmax, v);
    const double support_tol = std::max(1e-9, 1e-7 * wmax);
    double umin = kInf, umax = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (st.w[i] <= support_tol) continue;
        const double u = 0.5 * st.g[i];
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }

    double sum = 0.0;
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = std::max(0.0, st.w[i]);
        sum += weights[i];
    }
    for (double& v : weights) v /= sum;

    bool uniform = true;
    for (double h : grid.width)
        if (h != grid.width[0]) uniform = false;
    double mean_h = 0.0;
    for (double h : grid.width) mean_h += h;
    mean_h /= double(n);

    EquilibriumResult out{
        DiscretizedMeasure::make(grid.mid, std::move(weights),
                                 uniform ? grid.width[0] : mean_h),
        f_fw,
        st.gap,
        st.iterations,
        umax - umin,
        polished,
    };
    return out;
}

double capacity(const RealCompact& K, std::size_t gridsize) {
    if (!K.has_interior()) return 0.0;
    return std::exp(equilibrium_measure(K, gridsize).robin);
}

double chi_one_var(const DiscretizedMeasure& mu) { return log_energy(mu) + theta(); }

double kappa_one_var(const RealCompact& K, std::size_t gridsize) {
    if (!K.has_interior()) return -kInf;
    return equilibrium_measure(K, gridsize).robin + theta();
}

namespace {

// Cell masses come from exact distribution-function differences, so edge
// cells (where both reference densities blow up or vanish like a square
// root) carry their true mass and moment errors stay O(h^2).
DiscretizedMeasure cells_from_cdf(double lo, double hi, std::size_t gridsize,
                                  double (*cdf)(double, double, double),
                                  double p0, double p1) {
    if (gridsize < grid_min || gridsize > grid_max)
        throw ValidationError("gridsize must lie in [50, 8192]");
    const double h = (hi - lo) / double(gridsize);
    std::vector<double> pts(gridsize), wts(gridsize);
    double sum = 0.0;
    double prev = cdf(lo, p0, p1);
    for (std::size_t i = 0; i < gridsize; ++i) {
        pts[i] = lo + (double(i) + 0.5) * h;
        const double next = cdf(lo + double(i + 1) * h, p0, p1);
        wts[i] = std::max(0.0, next - prev);
        sum += wts[i];
        prev = next;
    }
    for (double& w : wts) w /= sum;
    return DiscretizedMeasure::make(std::move(pts), std::move(wts), h);
}

} // namespace

DiscretizedMeasure semicircle_density(double center, double variance,
                                      std::size_t gridsize) {
    if (!(variance > 0.0)) throw ValidationError("semicircle: variance must be > 0");
    const double r = 2.0 * std::sqrt(variance);
    return cells_from_cdf(
        center - r, center + r, gridsize,
        [](double x, double c, double v) {
            const double r2 = 4.0 * v;
            const double u = std::clamp(x - c, -std::sqrt(r2), std::sqrt(r2));
            return 0.5 + (u * std::sqrt(r2 - u * u) + r2 * std::asin(u / std::sqrt(r2))) /
                             (M_PI * r2);
        },
        center, variance);
}

DiscretizedMeasure arcsine_density(double a, double b, std::size_t gridsize) {
    if (!(a < b)) throw ValidationError("arcsine: requires a < b");
    return cells_from_cdf(
        a, b, gridsize,
        [](double x, double aa, double bb) {
            const double u = std::clamp((2.0 * x - aa - bb) / (bb - aa), -1.0, 1.0);
            return 0.5 + std::asin(u) / M_PI;
        },
        a, b);
}

} // namespace freent
