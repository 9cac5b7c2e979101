#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixbound/kernel_core.hpp"

namespace mixbound {

// Empirical E^{1/p}|S_n|^p with its delta-method standard error.
struct MomentEstimate {
    double p = 0.0;
    std::uint64_t n = 0;
    std::uint64_t replications = 0;
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

// One bound-vs-empirical comparison. `holds` grants the empirical side a
// 3-standard-error grace; bounds themselves are deterministic.
struct Verdict {
    std::string bound_name;
    double p = 0.0;
    std::uint64_t n = 0;
    double bound_value = 0.0;
    double empirical_value = 0.0;
    double std_error = 0.0;
    double ratio = 0.0;  // bound/empirical, +inf when empirical is 0
    bool holds = false;
};

inline constexpr std::uint64_t kMinReplications = 100;
inline constexpr double kDefaultMaxMomentOrder = 16.0;

// Full trajectories, one row per replication; meant for small inputs and
// distribution-level checks. Replication r draws from stream (seed, r).
std::vector<std::vector<std::uint32_t>> simulate_paths(const ChainModel& model, std::uint64_t n,
                                                       std::uint64_t replications,
                                                       std::uint64_t seed);

// Streaming reduction: sums[r] = sum_{i<n} weights(Z_i) over replication r's
// trajectory. The reduction order is fixed by replication index, so the
// result is identical for every thread count.
std::vector<double> additive_path_sums(const ChainModel& model, std::span<const double> weights,
                                       std::uint64_t n, std::uint64_t replications,
                                       std::uint64_t seed, int threads = 1);

MomentEstimate estimate_moment(const ChainModel& model, std::uint64_t n, double p,
                               std::uint64_t replications, std::uint64_t seed, int threads = 1);

// Empirical frequency of |S_n| >= threshold.
double estimate_tail(const ChainModel& model, std::uint64_t n, double threshold,
                     std::uint64_t replications, std::uint64_t seed, int threads = 1);

// Empirical R_{k,s}: the 2^{s-k}-th moment of the centered level-k sums,
// taken to the power 2^{k-s-1}. Uses the exact g_k from the Poisson layer.
MomentEstimate estimate_R_ks(const ChainModel& model, std::uint64_t n, std::uint32_t k,
                             std::uint32_t s, std::uint64_t replications, std::uint64_t seed,
                             int threads = 1);

struct CertifyConfig {
    std::vector<double> p_list{2.0, 4.0, 8.0};
    std::vector<std::uint64_t> n_list{10, 100, 1000};
    std::uint64_t replications = 10'000;
    std::uint64_t seed = 0;
    std::vector<double> delta_list{0.1353352832366127, 0.01};
    int threads = 1;
    double max_moment_order = kDefaultMaxMomentOrder;
};

struct CertifyResult {
    std::vector<Verdict> verdicts;
    std::uint64_t tau = 0;
    double sigma = 0.0;
    bool all_hold = false;
};

// Runs the full grid: moment bounds (stationary and, when the model carries
// an explicit start law, the shifted variant), the variance-free moment
// bound, exact second-moment comparisons, and deviation thresholds. f is
// rescaled to sup-norm 1 before anything runs.
CertifyResult certify(const ChainModel& model, const CertifyConfig& config);

}  // namespace mixbound
