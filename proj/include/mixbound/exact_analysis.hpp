#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixbound/kernel_core.hpp"

namespace mixbound {

// Meeting-time tail of the maximal coupling of two start laws:
// tail[k] = P(T > k) = tv(xi Q^k, xi' Q^k), exact for k = 0..horizon.
struct CouplingTailProfile {
    std::vector<double> tail;
    // Certified bound on sum_{k > horizon} tail[k]; +inf when the chain gave
    // no contraction certificate and the tail has not hit zero.
    double truncation_bound = 0.0;
    std::uint64_t tau = 0;  // 0 when no contraction certificate exists
};

struct CouplingMoment {
    double value;            // E[T^p] from the computed tail
    double remainder_bound;  // certified bound on the ignored tail contribution
};

// E_pi[ |sum_{i<n} fbar(Z_i)|^2 ] via cached autocovariances with certified
// geometric truncation.
double exact_second_moment(const StochasticKernel& q, std::span<const double> f,
                           const Distribution& pi, std::uint64_t n);

CouplingTailProfile coupling_tail(const StochasticKernel& q, const Distribution& xi,
                                  const Distribution& xi_prime, std::uint64_t horizon,
                                  const Distribution& pi);

// Smallest horizon whose per-step tail bound is negligible for moments up to
// order p_max.
std::uint64_t default_coupling_horizon(std::uint64_t tau, double p_max);

// E[T^p] = 1 + sum_{k>=2} (k^p - (k-1)^p) P(T > k-1) over the computed tail.
// Throws when the certified remainder exceeds 1% of the point value.
CouplingMoment coupling_moment(const CouplingTailProfile& profile, double p);

}  // namespace mixbound
