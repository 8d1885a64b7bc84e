#include "freent/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "freent/errors.hpp"
#include "freent/kernels.hpp"

namespace freent {
namespace {

double offdiag_mass(const std::vector<double>& re, const std::vector<double>& im,
                    std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double r = re[i * k + j];
            const double s = im[i * k + j];
            acc += 2.0 * (r * r + s * s);
        }
    return std::sqrt(acc);
}

// Diagonalizes in place.  When nre/nim are non-null they accumulate the
// transposed eigenvector matrix: row j ends up holding eigenvector j.
std::vector<double> jacobi(std::vector<double>& re, std::vector<double>& im,
                           std::size_t k,
                           std::vector<double>* nre, std::vector<double>* nim) {
    const auto& kn = kern::ops();
    if (nre) {
        nre->assign(k * k, 0.0);
        nim->assign(k * k, 0.0);
        for (std::size_t i = 0; i < k; ++i) (*nre)[i * k + i] = 1.0;
    }
    if (k == 1) return {re[0]};

    double frob = std::sqrt(kn.sum_sq(re.data(), re.size()) + kn.sum_sq(im.data(), im.size()));
    const double tol = 1e-12 * std::max(1.0, frob);
    // A pair whose magnitude is below its equal share of the target can be
    // skipped: if every pair were below it the sweep would already be done.
    const double skip2 = tol * tol / double(k * (k - 1));

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_mass(re, im, k) <= tol) {
            std::vector<double> d(k);
            for (std::size_t i = 0; i < k; ++i) d[i] = re[i * k + i];
            return d;
        }
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double zre = re[p * k + q];
                const double zim = im[p * k + q];
                const double az2 = zre * zre + zim * zim;
                if (az2 <= skip2) continue;
                const double az = std::sqrt(az2);
                const double wre = zre / az;
                const double wim = zim / az;
                const double alpha = re[p * k + p];
                const double beta = re[q * k + q];
                const double tau = (beta - alpha) / (2.0 * az);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                kn.rowrot(c, s, wre, wim,
                          re.data() + p * k, im.data() + p * k,
                          re.data() + q * k, im.data() + q * k, k);
                // The (p,q) block of V*AV is known in closed form.
                re[p * k + p] = alpha - t * az;
                re[q * k + q] = beta + t * az;
                im[p * k + p] = 0.0;
                im[q * k + q] = 0.0;
                re[p * k + q] = 0.0;
                im[p * k + q] = 0.0;
                re[q * k + p] = 0.0;
                im[q * k + p] = 0.0;
                // Columns p and q are the conjugates of the fresh rows.
                for (std::size_t j = 0; j < k; ++j) {
                    if (j == p || j == q) continue;
                    re[j * k + p] = re[p * k + j];
                    im[j * k + p] = -im[p * k + j];
                    re[j * k + q] = re[q * k + j];
                    im[j * k + q] = -im[q * k + j];
                }
                if (nre)
                    kn.rowrot(c, s, wre, -wim,
                              nre->data() + p * k, nim->data() + p * k,
                              nre->data() + q * k, nim->data() + q * k, k);
            }
        }
    }
    // Sixty sweeps without reaching the target means the iteration stalled
    // well above the rounding floor.
    if (offdiag_mass(re, im, k) > 1e-9 * std::max(1.0, frob))
        throw NumericError("jacobi eigensolver did not converge");
    std::vector<double> d(k);
    for (std::size_t i = 0; i < k; ++i) d[i] = re[i * k + i];
    return d;
}

std::vector<std::size_t> ascending_order(const std::vector<double>& d) {
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    return idx;
}

} // namespace

std::vector<double> eigenvalues(const HermitianMatrix& m) {
    std::vector<double> re = m.re(), im = m.im();
    auto d = jacobi(re, im, m.dim(), nullptr, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

EigenH eigh(const HermitianMatrix& m) {
    const std::size_t k = m.dim();
    std::vector<double> re = m.re(), im = m.im();
    std::vector<double> nre, nim;
    const auto d = jacobi(re, im, k, &nre, &nim);
    const auto order = ascending_order(d);

    EigenH out;
    out.values.resize(k);
    out.vectors = CMat(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t src = order[j];
        out.values[j] = d[src];
        // Row src of the accumulated transpose is eigenvector src.
        for (std::size_t i = 0; i < k; ++i) {
            out.vectors.re[i * k + j] = nre[src * k + i];
            out.vectors.im[i * k + j] = nim[src * k + i];
        }
    }
    return out;
}

double opnorm(const HermitianMatrix& m) {
    const auto d = eigenvalues(m);
    return std::max(std::abs(d.front()), std::abs(d.back()));
}

double opnorm_hermitian_part(const CMat& m) {
    const std::size_t k = m.k;
    std::vector<double> re(k * k), im(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            re[i * k + j] = 0.5 * (m.re[i * k + j] + m.re[j * k + i]);
            im[i * k + j] = 0.5 * (m.im[i * k + j] - m.im[j * k + i]);
        }
    const auto d = jacobi(re, im, k, nullptr, nullptr);
    double mx = 0.0;
    for (double v : d) mx = std::max(mx, std::abs(v));
    return mx;
}

HermitianMatrix from_eigen(const EigenH& e) {
    const std::size_t k = e.vectors.k;
    CMat acc(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double sre = 0.0, sim = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                // values[l] * U_il * conj(U_jl)
                const double ur = e.vectors.re[i * k + l];
                const double ui = e.vectors.im[i * k + l];
                const double vr = e.vectors.re[j * k + l];
                const double vi = e.vectors.im[j * k + l];
                sre += e.values[l] * (ur * vr + ui * vi);
                sim += e.values[l] * (ui * vr - ur * vi);
            }
            acc.re[i * k + j] = sre;
            acc.im[i * k + j] = sim;
        }
    return HermitianMatrix(acc);
}

double uniform_metric(const MatrixTuple& a, const MatrixTuple& b) {
    if (a.arity() != b.arity()) throw ValidationError("uniform_metric: arity mismatch");
    if (a.dim() != b.dim()) throw ValidationError("uniform_metric: dimension mismatch");
    double mx = 0.0;
    for (std::size_t j = 0; j < a.arity(); ++j)
        mx = std::max(mx, opnorm(lincomb(1.0, a[j], -1.0, b[j])));
    return mx;
}

} // namespace freent
