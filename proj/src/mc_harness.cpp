#include "mixbound/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "mixbound/bound_calculus.hpp"
#include "mixbound/exact_analysis.hpp"
#include "mixbound/poisson_variance.hpp"
#include "mixbound/rng.hpp"
#include "mixbound/simd/kernels.hpp"

namespace mixbound {

namespace {

// Inverse-CDF tables for the start law and every kernel row.
struct SamplingTables {
    std::vector<double> initial_cdf;
    Matrix row_cdf;  // row z holds the cumulative row Q(z, .)
    std::size_t size = 0;

    static SamplingTables build(const ChainModel& model) {
        SamplingTables t;
        t.size = model.kernel.size();
        const Distribution start =
            model.initial ? *model.initial : stationary_distribution(model.kernel);
        t.initial_cdf.assign(start.weights().begin(), start.weights().end());
        for (std::size_t i = 1; i < t.size; ++i) t.initial_cdf[i] += t.initial_cdf[i - 1];
        t.row_cdf = model.kernel.matrix();
        for (std::size_t z = 0; z < t.size; ++z) {
            auto row = t.row_cdf.row(z);
            for (std::size_t i = 1; i < t.size; ++i) row[i] += row[i - 1];
        }
        return t;
    }
};

std::uint32_t sample_index(std::span<const double> cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    return static_cast<std::uint32_t>(std::min(idx, cdf.size() - 1));
}

// Runs fn(r) over replication indices, partitioned in contiguous blocks.
// All outputs are written to per-replication slots, so scheduling never
// affects the result.
template <typename Fn>
void for_each_replication(std::uint64_t replications, int threads, Fn&& fn) {
    if (threads <= 1 || replications < 2) {
        for (std::uint64_t r = 0; r < replications; ++r) fn(r);
        return;
    }
    const std::uint64_t workers =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), replications);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (replications + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t lo = w * chunk;
        const std::uint64_t hi = std::min(replications, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::uint64_t r = lo; r < hi; ++r) fn(r);
        });
    }
    for (auto& t : pool) t.join();
}

double path_sum(const SamplingTables& tables, std::span<const double> weights, std::uint64_t n,
                std::uint64_t seed, std::uint64_t r) {
    rng::Xoshiro256pp gen = rng::stream_generator(seed, r);
    std::uint32_t state = sample_index(tables.initial_cdf, gen.next_double());
    double acc = weights[state];
    for (std::uint64_t i = 1; i < n; ++i) {
        state = sample_index(tables.row_cdf.row(state), gen.next_double());
        acc += weights[state];
    }
    return acc;
}

struct MomentStats {
    double value;
    double std_error;
};

// root_exponent-th power of the mean of |sums|^p, with the delta-method
// standard error propagated through the root. Sums are rescaled by their
// maximum first, so the scaled p-th moments live in [1/R, 1] and the only
// overflow horizon is max^p itself.
MomentStats root_moment(std::span<const double> abs_sums, double p, double root_exponent) {
    double top = 0.0;
    for (double v : abs_sums) top = std::max(top, v);
    if (top == 0.0) return {0.0, 0.0};
    if (p * std::log(top) > 700.0)
        throw ValidationError("moment estimate would overflow: p * ln(max |S_n|) too large");

    const double count = static_cast<double>(abs_sums.size());
    double scaled_p = 0.0, scaled_2p = 0.0;
    for (double v : abs_sums) {
        const double vp = std::pow(v / top, p);
        scaled_p += vp;
        scaled_2p += vp * vp;
    }
    scaled_p /= count;
    scaled_2p /= count;
    const double var_scaled = std::max(0.0, (scaled_2p - scaled_p * scaled_p) / count);
    // value = (top^p scaled_p)^root; scaled_p >= 1/R keeps the powers tame
    const double value = std::pow(top, p * root_exponent) * std::pow(scaled_p, root_exponent);
    const double std_error = root_exponent * std::pow(top, p * root_exponent) *
                             std::pow(scaled_p, root_exponent - 1.0) * std::sqrt(var_scaled);
    return {value, std_error};
}

Verdict make_verdict(std::string name, double p, std::uint64_t n, double bound, double empirical,
                     double std_error) {
    Verdict v;
    v.bound_name = std::move(name);
    v.p = p;
    v.n = n;
    v.bound_value = bound;
    v.empirical_value = empirical;
    v.std_error = std_error;
    v.ratio = empirical > 0.0 ? bound / empirical : std::numeric_limits<double>::infinity();
    v.holds = bound >= empirical - 3.0 * std_error;
    return v;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> simulate_paths(const ChainModel& model, std::uint64_t n,
                                                       std::uint64_t replications,
                                                       std::uint64_t seed) {
    if (n == 0) throw ValidationError("simulate_paths: n must be >= 1");
    const SamplingTables tables = SamplingTables::build(model);
    std::vector<std::vector<std::uint32_t>> paths(replications);
    for (std::uint64_t r = 0; r < replications; ++r) {
        rng::Xoshiro256pp gen = rng::stream_generator(seed, r);
        auto& path = paths[r];
        path.resize(n);
        path[0] = sample_index(tables.initial_cdf, gen.next_double());
        for (std::uint64_t i = 1; i < n; ++i)
            path[i] = sample_index(tables.row_cdf.row(path[i - 1]), gen.next_double());
    }
    return paths;
}

std::vector<double> additive_path_sums(const ChainModel& model, std::span<const double> weights,
                                       std::uint64_t n, std::uint64_t replications,
                                       std::uint64_t seed, int threads) {
    if (n == 0) throw ValidationError("additive_path_sums: n must be >= 1");
    if (weights.size() != model.kernel.size())
        throw ValidationError("additive_path_sums: weight length mismatch");
    const SamplingTables tables = SamplingTables::build(model);
    std::vector<double> sums(replications, 0.0);
    for_each_replication(replications, threads, [&](std::uint64_t r) {
        sums[r] = path_sum(tables, weights, n, seed, r);
    });
    return sums;
}

MomentEstimate estimate_moment(const ChainModel& model, std::uint64_t n, double p,
                               std::uint64_t replications, std::uint64_t seed, int threads) {
    if (p < 1.0) throw ValidationError("estimate_moment: p must be >= 1");
    if (replications < kMinReplications)
        throw ValidationError("estimate_moment: need at least 100 replications");

    const Distribution pi = stationary_distribution(model.kernel);
    const std::vector<double> fbar = centered(model.f, pi);
    std::vector<double> sums = additive_path_sums(model, fbar, n, replications, seed, threads);
    for (double& v : sums) v = std::fabs(v);

    const MomentStats stats = root_moment(sums, p, 1.0 / p);
    return MomentEstimate{p, n, replications, stats.value, stats.std_error, seed};
}

double estimate_tail(const ChainModel& model, std::uint64_t n, double threshold,
                     std::uint64_t replications, std::uint64_t seed, int threads) {
    if (replications < kMinReplications)
        throw ValidationError("estimate_tail: need at least 100 replications");
    const Distribution pi = stationary_distribution(model.kernel);
    const std::vector<double> fbar = centered(model.f, pi);
    const std::vector<double> sums =
        additive_path_sums(model, fbar, n, replications, seed, threads);
    std::uint64_t hits = 0;
    for (double v : sums)
        if (std::fabs(v) >= threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(replications);
}

MomentEstimate estimate_R_ks(const ChainModel& model, std::uint64_t n, std::uint32_t k,
                             std::uint32_t s, std::uint64_t replications, std::uint64_t seed,
                             int threads) {
    if (k < 1 || k > s) throw ValidationError("estimate_R_ks: need 1 <= k <= s");
    if (s > 6) throw ValidationError("estimate_R_ks: s capped at 6");
    if (replications < kMinReplications)
        throw ValidationError("estimate_R_ks: need at least 100 replications");

    const Distribution pi = stationary_distribution(model.kernel);
    const PoissonSolution poisson = solve_poisson_direct(model.kernel, model.f, pi);
    const DecompositionLevel level = decomposition_level(model.kernel, poisson.g, pi, k);
    const std::vector<double> weights = centered(level.g_k, pi);

    std::vector<double> sums = additive_path_sums(model, weights, n, replications, seed, threads);
    for (double& v : sums) v = std::fabs(v);
    const double q = std::exp2(static_cast<double>(s) - static_cast<double>(k));

    // R = (mean |sum|^q)^{1/(2q)}
    const MomentStats stats = root_moment(sums, q, 1.0 / (2.0 * q));
    return MomentEstimate{q, n, replications, stats.value, stats.std_error, seed};
}

CertifyResult certify(const ChainModel& model, const CertifyConfig& config) {
    if (config.replications < kMinReplications)
        throw ValidationError("certify: need at least 100 replications");
    if (config.p_list.empty() || config.n_list.empty())
        throw ValidationError("certify: empty p or n grid");
    for (double p : config.p_list) {
        if (p < 2.0) throw ValidationError("certify: p values must be >= 2");
        if (p > config.max_moment_order)
            throw ValidationError("certify: p exceeds the configured moment-order cap");
    }
    for (double delta : config.delta_list)
        if (!(delta > 0.0) || delta > bounds::kMaxBernsteinDelta)
            throw ValidationError("certify: delta values must lie in (0, e^-2]");

    // Bounds assume a sup-norm-1 test function; rescale up front.
    ChainModel scaled{model.kernel, model.f, model.initial};
    const double f_sup = simd::max_abs(scaled.f);
    if (f_sup > 1.0)
        for (double& v : scaled.f) v /= f_sup;

    const Distribution pi = stationary_distribution(scaled.kernel);
    const MixingProfile mix = mixing_time(scaled.kernel);
    if (!mix.tau) throw NonErgodicError("certify: chain does not mix within the horizon");
    const std::uint64_t tau = *mix.tau;

    const PoissonSolution poisson = solve_poisson_direct(scaled.kernel, scaled.f, pi);
    const double sigma2_direct = asymptotic_variance_poisson(scaled.f, poisson.g, pi);
    const double sigma2_series = asymptotic_variance_series(scaled.kernel, scaled.f, pi);
    if (std::fabs(sigma2_direct - sigma2_series) > 1e-8)
        throw NonErgodicError("certify: asymptotic-variance routes disagree");
    const double sigma = std::sqrt(std::max(0.0, sigma2_direct));

    const std::vector<double> fbar = centered(scaled.f, pi);
    const ChainModel stationary_model{scaled.kernel, scaled.f, std::nullopt};

    CertifyResult result;
    result.tau = tau;
    result.sigma = sigma;

    std::uint64_t cell = 0;
    for (std::uint64_t n : config.n_list) {
        if (n == 0) throw ValidationError("certify: n values must be >= 1");
        const std::uint64_t cell_seed = rng::mix64(config.seed ^ rng::mix64(++cell));
        std::vector<double> sums = additive_path_sums(stationary_model, fbar, n,
                                                      config.replications, cell_seed,
                                                      config.threads);
        for (double& v : sums) v = std::fabs(v);

        for (double p : config.p_list) {
            const MomentStats stats = root_moment(sums, p, 1.0 / p);
            result.verdicts.push_back(
                make_verdict("rosenthal_pi", p, n,
                             bounds::rosenthal_bound(p, n, tau, sigma, true).total, stats.value,
                             stats.std_error));
            result.verdicts.push_back(
                make_verdict("aux_rosenthal", p, n,
                             bounds::auxiliary_rosenthal_bound(p, n, tau).total, stats.value,
                             stats.std_error));
        }

        const double exact_root =
            std::sqrt(exact_second_moment(scaled.kernel, scaled.f, pi, n));
        result.verdicts.push_back(make_verdict("crude_second_moment", 2.0, n,
                                               bounds::crude_variance_bound(n, tau), exact_root,
                                               0.0));
        result.verdicts.push_back(make_verdict("poisson_second_moment", 2.0, n,
                                               bounds::poisson_variance_bound(n, tau, sigma),
                                               exact_root, 0.0));

        for (double delta : config.delta_list) {
            const double threshold = bounds::bernstein_threshold(delta, n, tau, sigma).conservative;
            std::uint64_t hits = 0;
            for (double v : sums)
                if (v >= threshold) ++hits;
            const double freq =
                static_cast<double>(hits) / static_cast<double>(config.replications);
            const double freq_se =
                std::sqrt(std::max(0.0, freq * (1.0 - freq) /
                                            static_cast<double>(config.replications)));
            result.verdicts.push_back(
                make_verdict("bernstein", std::log(1.0 / delta), n, delta, freq, freq_se));
        }

        if (scaled.initial) {
            const std::uint64_t shifted_seed = rng::mix64(cell_seed + 1);
            std::vector<double> xi_sums = additive_path_sums(scaled, fbar, n,
                                                             config.replications, shifted_seed,
                                                             config.threads);
            for (double& v : xi_sums) v = std::fabs(v);
            for (double p : config.p_list) {
                const MomentStats stats = root_moment(xi_sums, p, 1.0 / p);
                result.verdicts.push_back(
                    make_verdict("rosenthal_xi", p, n,
                                 bounds::rosenthal_bound(p, n, tau, sigma, false).total,
                                 stats.value, stats.std_error));
            }
        }
    }

    result.all_hold = std::all_of(result.verdicts.begin(), result.verdicts.end(),
                                  [](const Verdict& v) { return v.holds; });
    return result;
}

}  // namespace mixbound
