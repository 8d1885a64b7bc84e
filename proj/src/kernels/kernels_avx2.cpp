#include "freent/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace freent::kern {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpby_avx2(double a, const double* x, double b, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double sum_sq_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(x + i);
        __m256d v1 = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void rowrot_avx2(double c, double s, double wre, double wim,
                 double* xre, double* xim, double* yre, double* yim,
                 std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d vwre = _mm256_set1_pd(wre);
    const __m256d vwim = _mm256_set1_pd(wim);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d yr = _mm256_loadu_pd(yre + i);
        const __m256d yi = _mm256_loadu_pd(yim + i);
        const __m256d xr = _mm256_loadu_pd(xre + i);
        const __m256d xi = _mm256_loadu_pd(xim + i);
        const __m256d wyr = _mm256_fmsub_pd(vwre, yr, _mm256_mul_pd(vwim, yi));
        const __m256d wyi = _mm256_fmadd_pd(vwre, yi, _mm256_mul_pd(vwim, yr));
        _mm256_storeu_pd(xre + i, _mm256_fnmadd_pd(vs, wyr, _mm256_mul_pd(vc, xr)));
        _mm256_storeu_pd(xim + i, _mm256_fnmadd_pd(vs, wyi, _mm256_mul_pd(vc, xi)));
        _mm256_storeu_pd(yre + i, _mm256_fmadd_pd(vc, wyr, _mm256_mul_pd(vs, xr)));
        _mm256_storeu_pd(yim + i, _mm256_fmadd_pd(vc, wyi, _mm256_mul_pd(vs, xi)));
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

void cgemm_acc_avx2(const double* are, const double* aim,
                    const double* bre, const double* bim,
                    double* cre, double* cim, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        double* cr = cre + i * k;
        double* ci = cim + i * k;
        for (std::size_t l = 0; l < k; ++l) {
            const __m256d var = _mm256_set1_pd(are[i * k + l]);
            const __m256d vai = _mm256_set1_pd(aim[i * k + l]);
            const double* br = bre + l * k;
            const double* bi = bim + l * k;
            std::size_t j = 0;
            for (; j + 4 <= k; j += 4) {
                __m256d vbr = _mm256_loadu_pd(br + j);
                __m256d vbi = _mm256_loadu_pd(bi + j);
                __m256d vcr = _mm256_loadu_pd(cr + j);
                __m256d vci = _mm256_loadu_pd(ci + j);
                vcr = _mm256_fmadd_pd(var, vbr, vcr);
                vcr = _mm256_fnmadd_pd(vai, vbi, vcr);
                vci = _mm256_fmadd_pd(var, vbi, vci);
                vci = _mm256_fmadd_pd(vai, vbr, vci);
                _mm256_storeu_pd(cr + j, vcr);
                _mm256_storeu_pd(ci + j, vci);
            }
            const double ar = are[i * k + l];
            const double ai = aim[i * k + l];
            for (; j < k; ++j) {
                cr[j] += ar * br[j] - ai * bi[j];
                ci[j] += ar * bi[j] + ai * br[j];
            }
        }
    }
}

} // namespace

const KernelOps kernels_avx2 = {
    dot_avx2, axpby_avx2, sum_sq_avx2, rowrot_avx2, cgemm_acc_avx2,
    "avx2",
};

} // namespace freent::kern
#endif
