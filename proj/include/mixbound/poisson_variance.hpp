#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixbound/kernel_core.hpp"

namespace mixbound {

enum class PoissonMethod { direct_solve, series };

// Zero-mean solution of g - Qg = f - pi(f).
struct PoissonSolution {
    std::vector<double> g;
    double residual;  // max_z |g - Qg - fbar|
    double sup_norm;  // ||g||_inf
    PoissonMethod method;
};

// Level-k powers of the Poisson solution: g_k = Q(g^{2^k}) - (Qg)^{2^k} and
// h_k = g^{2^k} - (Qg)^{2^k}. Both share the same stationary mean.
struct DecompositionLevel {
    std::uint32_t k;
    std::vector<double> g_k;
    std::vector<double> h_k;
    double sup_h;
};

inline constexpr double kDefaultSeriesTol = 1e-12;
inline constexpr std::uint32_t kMaxDecompositionLevel = 16;

// Certified bound on sum_{j>k} (1/4)^{floor(j/tau)} in closed form.
double geometric_tail_sum(std::uint64_t k, std::uint64_t tau);

// Linear solve of (I - Q) g = fbar with one redundant equation replaced by
// pi . g = 0, which pins the additive constant.
PoissonSolution solve_poisson_direct(const StochasticKernel& q, std::span<const double> f,
                                     const Distribution& pi);

// Truncated series sum_{k=0..K} (Q^k f - pi(f)); K certified from the
// geometric contraction so the dropped tail is below tol.
PoissonSolution solve_poisson_series(const StochasticKernel& q, std::span<const double> f,
                                     const Distribution& pi, double tol = kDefaultSeriesTol);

// pi(fbar^2) + 2 sum_{l>=1} pi(fbar . Q^l fbar), truncated by the same
// certified tail rule; tiny negative truncation artifacts clamp to 0.
double asymptotic_variance_series(const StochasticKernel& q, std::span<const double> f,
                                  const Distribution& pi, double tol = kDefaultSeriesTol);

// pi(fbar (2g - fbar)); independent of the additive normalization of g.
double asymptotic_variance_poisson(std::span<const double> f, std::span<const double> g,
                                   const Distribution& pi);

DecompositionLevel decomposition_level(const StochasticKernel& q, std::span<const double> g,
                                       const Distribution& pi, std::uint32_t k);

}  // namespace mixbound
