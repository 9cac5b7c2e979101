#pragma once

#include <cstddef>
#include <span>

// Reduction and elementwise kernels backing the dense linear-algebra layer.
// Two implementations exist: a portable scalar reference and an AVX2+FMA
// variant. The active table is resolved once per process from CPU features;
// the MIXBOUND_SIMD environment variable ("scalar" or "avx2") overrides the
// detection, which the equivalence tests use to pin a specific path.

namespace mixbound::simd {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    // sum_i w[i]*a[i]*b[i]
    double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
    // 0.5 * sum_i |a[i]-b[i]|  (total-variation distance between weight vectors)
    double (*half_l1_diff)(const double*, const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
    // y += alpha * x
    void (*axpy)(double, const double*, double*, std::size_t);
    const char* name;
};

const KernelTable& scalar_kernels();

// True when the AVX2 table is compiled in and this CPU supports AVX2+FMA.
bool avx2_available();
const KernelTable& avx2_kernels();

// Cached dispatch decision (env override > CPU detection > scalar).
const KernelTable& active_kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_kernels().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) {
    return active_kernels().sum(a.data(), a.size());
}
inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
    return active_kernels().weighted_dot(w.data(), a.data(), b.data(), w.size());
}
inline double half_l1_diff(std::span<const double> a, std::span<const double> b) {
    return active_kernels().half_l1_diff(a.data(), b.data(), a.size());
}
inline double max_abs(std::span<const double> a) {
    return active_kernels().max_abs(a.data(), a.size());
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return active_kernels().max_abs_diff(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active_kernels().axpy(alpha, x.data(), y.data(), y.size());
}

}  // namespace mixbound::simd
