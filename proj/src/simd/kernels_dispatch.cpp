#include "mixbound/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace mixbound::simd {

bool avx2_available() {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable& resolve() {
    if (const char* env = std::getenv("MIXBOUND_SIMD"); env != nullptr && *env != '\0') {
        if (std::strcmp(env, "scalar") == 0) return scalar_kernels();
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw std::runtime_error("MIXBOUND_SIMD=avx2 but this CPU/build lacks AVX2+FMA");
            return avx2_kernels();
        }
        if (std::strcmp(env, "auto") != 0)
            throw std::runtime_error("MIXBOUND_SIMD must be one of: scalar, avx2, auto");
    }
    return avx2_available() ? avx2_kernels() : scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
    static const KernelTable& table = resolve();
    return table;
}

}  // namespace mixbound::simd
