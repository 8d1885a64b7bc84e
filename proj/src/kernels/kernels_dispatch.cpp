#include "freent/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace freent::kern {
namespace {

const KernelOps* select() {
    const char* env = std::getenv("FREENT_KERNELS");
    const std::string choice = env ? env : "auto";
    if (choice == "scalar") return &kernels_scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (choice == "avx2") {
        if (!__builtin_cpu_supports("avx2"))
            throw std::runtime_error("FREENT_KERNELS=avx2 but CPU lacks AVX2");
        return &kernels_avx2;
    }
    if (choice == "auto")
        return __builtin_cpu_supports("avx2") ? &kernels_avx2 : &kernels_scalar;
#elif defined(__aarch64__)
    if (choice == "neon") return &kernels_neon;
    if (choice == "auto") return &kernels_neon;
#else
    if (choice == "auto") return &kernels_scalar;
#endif
    throw std::runtime_error("unsupported FREENT_KERNELS value: " + choice);
}

} // namespace

const KernelOps& ops() {
    static const KernelOps* selected = select();
    return *selected;
}

const char* backend_name() { return ops().name; }

} // namespace freent::kern
