#pragma once
#include <cstddef>

namespace freent::kern {

// Hot inner loops shared by the eigensolver, the simplex solver and the
// estimators.  Every function has a scalar reference implementation plus
// optional vectorized variants; the active set is chosen once at runtime.
struct KernelOps {
    // sum_i x[i]*y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y[i] = a*x[i] + b*y[i]
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    // sum_i x[i]^2
    double (*sum_sq)(const double* x, std::size_t n);
    // Plane rotation of two complex rows held as split re/im arrays:
    //   x' = c*x - s*(w*y),  y' = s*x + c*(w*y),  w = wre + i*wim, |w| = 1.
    // c, s real.  In-place, all four arrays length n.
    void (*rowrot)(double c, double s, double wre, double wim,
                   double* xre, double* xim, double* yre, double* yim,
                   std::size_t n);
    // C += A*B for split-format complex row-major square matrices (dim k).
    void (*cgemm_acc)(const double* are, const double* aim,
                      const double* bre, const double* bim,
                      double* cre, double* cim, std::size_t k);
    const char* name;
};

extern const KernelOps kernels_scalar;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelOps kernels_avx2;
#endif
#if defined(__aarch64__)
extern const KernelOps kernels_neon;
#endif

// Selected implementation.  Honors FREENT_KERNELS = auto|scalar|avx2|neon;
// under "auto" picks the widest variant the CPU supports.  Throws on an
// unknown value or a variant this build/CPU cannot run.
const KernelOps& ops();

// Name of the active variant, for run manifests.
const char* backend_name();

} // namespace freent::kern
