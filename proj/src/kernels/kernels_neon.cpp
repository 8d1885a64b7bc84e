#include "freent/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace freent::kern {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double out = vaddvq_f64(acc);
    for (; i < n; ++i) out += x[i] * y[i];
    return out;
}

void axpby_neon(double a, const double* x, double b, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vmulq_f64(vb, vld1q_f64(y + i));
        vst1q_f64(y + i, vfmaq_f64(vy, va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double sum_sq_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(x + i);
        acc = vfmaq_f64(acc, v, v);
    }
    double out = vaddvq_f64(acc);
    for (; i < n; ++i) out += x[i] * x[i];
    return out;
}

void rowrot_neon(double c, double s, double wre, double wim,
                 double* xre, double* xim, double* yre, double* yim,
                 std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(c);
    const float64x2_t vs = vdupq_n_f64(s);
    const float64x2_t vwre = vdupq_n_f64(wre);
    const float64x2_t vwim = vdupq_n_f64(wim);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t yr = vld1q_f64(yre + i);
        const float64x2_t yi = vld1q_f64(yim + i);
        const float64x2_t xr = vld1q_f64(xre + i);
        const float64x2_t xi = vld1q_f64(xim + i);
        const float64x2_t wyr = vfmsq_f64(vmulq_f64(vwre, yr), vwim, yi);
        const float64x2_t wyi = vfmaq_f64(vmulq_f64(vwre, yi), vwim, yr);
        vst1q_f64(xre + i, vfmsq_f64(vmulq_f64(vc, xr), vs, wyr));
        vst1q_f64(xim + i, vfmsq_f64(vmulq_f64(vc, xi), vs, wyi));
        vst1q_f64(yre + i, vfmaq_f64(vmulq_f64(vs, xr), vc, wyr));
        vst1q_f64(yim + i, vfmaq_f64(vmulq_f64(vs, xi), vc, wyi));
    }
    for (; i < n; ++i) {
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

void cgemm_acc_neon(const double* are, const double* aim,
                    const double* bre, const double* bim,
                    double* cre, double* cim, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        double* cr = cre + i * k;
        double* ci = cim + i * k;
        for (std::size_t l = 0; l < k; ++l) {
            const double ar = are[i * k + l];
            const double ai = aim[i * k + l];
            const float64x2_t var = vdupq_n_f64(ar);
            const float64x2_t vai = vdupq_n_f64(ai);
            const double* br = bre + l * k;
            const double* bi = bim + l * k;
            std::size_t j = 0;
            for (; j + 2 <= k; j += 2) {
                float64x2_t vbr = vld1q_f64(br + j);
                float64x2_t vbi = vld1q_f64(bi + j);
                float64x2_t vcr = vld1q_f64(cr + j);
                float64x2_t vci = vld1q_f64(ci + j);
                vcr = vfmaq_f64(vcr, var, vbr);
                vcr = vfmsq_f64(vcr, vai, vbi);
                vci = vfmaq_f64(vci, var, vbi);
                vci = vfmaq_f64(vci, vai, vbr);
                vst1q_f64(cr + j, vcr);
                vst1q_f64(ci + j, vci);
            }
            for (; j < k; ++j) {
                cr[j] += ar * br[j] - ai * bi[j];
                ci[j] += ar * bi[j] + ai * br[j];
            }
        }
    }
}

} // namespace

const KernelOps kernels_neon = {
    dot_neon, axpby_neon, sum_sq_neon, rowrot_neon, cgemm_acc_neon,
    "neon",
};

} // namespace freent::kern
#endif
