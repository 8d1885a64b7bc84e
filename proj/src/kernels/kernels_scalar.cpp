#include "freent/kernels.hpp"

namespace freent::kern {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void rowrot_scalar(double c, double s, double wre, double wim,
                   double* xre, double* xim, double* yre, double* yim,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double wyre = wre * yre[i] - wim * yim[i];
        const double wyim = wre * yim[i] + wim * yre[i];
        const double nxre = c * xre[i] - s * wyre;
        const double nxim = c * xim[i] - s * wyim;
        yre[i] = s * xre[i] + c * wyre;
        yim[i] = s * xim[i] + c * wyim;
        xre[i] = nxre;
        xim[i] = nxim;
    }
}

void cgemm_acc_scalar(const double* are, const double* aim,
                      const double* bre, const double* bim,
                      double* cre, double* cim, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double ar = are[i * k + l];
            const double ai = aim[i * k + l];
            const double* br = bre + l * k;
            const double* bi = bim + l * k;
            double* cr = cre + i * k;
            double* ci = cim + i * k;
            for (std::size_t j = 0; j < k; ++j) {
                cr[j] += ar * br[j] - ai * bi[j];
                ci[j] += ar * bi[j] + ai * br[j];
            }
        }
    }
}

} // namespace

const KernelOps kernels_scalar = {
    dot_scalar, axpby_scalar, sum_sq_scalar, rowrot_scalar, cgemm_acc_scalar,
    "scalar",
};

} // namespace freent::kern
