#include "mixbound/exact_analysis.hpp"

#include <cmath>
#include <limits>

#include "mixbound/poisson_variance.hpp"
#include "mixbound/simd/kernels.hpp"

namespace mixbound {

double exact_second_moment(const StochasticKernel& q, std::span<const double> f,
                           const Distribution& pi, std::uint64_t n) {
    const std::size_t size = q.size();
    if (f.size() != size) throw ValidationError("exact_second_moment: f length mismatch");
    if (n == 0) throw ValidationError("exact_second_moment: n must be >= 1");

    const std::vector<double> fbar = centered(f, pi);
    const double gamma0 = simd::weighted_dot(pi.weights(), fbar, fbar);

    // E|S_n|^2 = n gamma(0) + 2 sum_{k=1}^{n-1} (n-k) gamma(k) with
    // gamma(k) = pi(fbar . Q^k fbar). Lags beyond the contraction window
    // contribute below 1e-13 in total and are dropped.
    std::uint64_t max_lag = n - 1;
    const MixingProfile profile = mixing_time(q);
    if (profile.tau) {
        const double fbar_sup = simd::max_abs(fbar);
        const double f_sup = simd::max_abs(f);
        const double weight = 2.0 * static_cast<double>(n) * 2.0 * fbar_sup * f_sup;
        std::uint64_t lag = 0;
        while (lag < n - 1 && weight * geometric_tail_sum(lag, *profile.tau) > 1e-13) ++lag;
        max_lag = lag;
    }

    double acc = static_cast<double>(n) * gamma0;
    std::vector<double> term = fbar;
    std::vector<double> next(size, 0.0);
    for (std::uint64_t k = 1; k <= max_lag; ++k) {
        matvec(q.matrix(), term, next);
        term.swap(next);
        const double gamma_k = simd::weighted_dot(pi.weights(), fbar, term);
        acc += 2.0 * static_cast<double>(n - k) * gamma_k;
    }
    return acc;
}

CouplingTailProfile coupling_tail(const StochasticKernel& q, const Distribution& xi,
                                  const Distribution& xi_prime, std::uint64_t horizon,
                                  const Distribution& pi) {
    const std::size_t size = q.size();
    if (xi.size() != size || xi_prime.size() != size || pi.size() != size)
        throw ValidationError("coupling_tail: distribution size mismatch");
    if (horizon > kMaxKernelPower) throw ValidationError("coupling_tail: horizon exceeds cap");

    CouplingTailProfile profile;
    profile.tail.reserve(horizon + 1);

    std::vector<double> mu(xi.weights().begin(), xi.weights().end());
    std::vector<double> nu(xi_prime.weights().begin(), xi_prime.weights().end());
    std::vector<double> scratch(size, 0.0);
    profile.tail.push_back(tv_distance(std::span<const double>(mu), nu));
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        vecmat(mu, q.matrix(), scratch);
        mu.swap(scratch);
        vecmat(nu, q.matrix(), scratch);
        nu.swap(scratch);
        profile.tail.push_back(tv_distance(std::span<const double>(mu), nu));
    }

    const MixingProfile mix = mixing_time(q);
    if (mix.tau) {
        profile.tau = *mix.tau;
        profile.truncation_bound = 2.0 * geometric_tail_sum(horizon, *mix.tau);
    } else {
        // TV between evolved laws never increases, so an exactly coupled tail
        // stays coupled even without a contraction certificate.
        profile.truncation_bound =
            profile.tail.back() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return profile;
}

std::uint64_t default_coupling_horizon(std::uint64_t tau, double p_max) {
    if (tau == 0) throw ValidationError("default_coupling_horizon: tau must be >= 1");
    for (std::uint64_t k = 1; k <= kMaxKernelPower; ++k) {
        const double per_step = 2.0 * std::pow(0.25, static_cast<double>(k / tau)) *
                                std::pow(static_cast<double>(k + 1), p_max);
        if (per_step < 1e-10) return k;
    }
    return kMaxKernelPower;
}

CouplingMoment coupling_moment(const CouplingTailProfile& profile, double p) {
    if (p < 1.0) throw ValidationError("coupling_moment: p must be >= 1");
    if (profile.tail.empty()) throw ValidationError("coupling_moment: empty tail");

    const std::uint64_t horizon = profile.tail.size() - 1;
    double value = 1.0;
    for (std::uint64_t k = 2; k <= horizon + 1; ++k) {
        const double increment = std::pow(static_cast<double>(k), p) -
                                 std::pow(static_cast<double>(k - 1), p);
        value += increment * profile.tail[k - 1];
    }

    double remainder = 0.0;
    if (profile.tail.back() != 0.0) {
        if (profile.tau == 0) {
            remainder = std::numeric_limits<double>::infinity();
        } else {
            // (k^p - (k-1)^p) P(T > k-1) <= 8 p k^{p-1} rho^{k-1} with
            // rho = (1/4)^{1/tau}; the majorant is ratio-bounded by
            // q = rho (1 + 1/M)^{p-1} from M on, giving a geometric closure.
            const double rho = std::pow(0.25, 1.0 / static_cast<double>(profile.tau));
            const double m = static_cast<double>(horizon + 2);
            const double ratio = rho * std::pow(1.0 + 1.0 / m, p - 1.0);
            if (ratio >= 1.0) {
                remainder = std::numeric_limits<double>::infinity();
            } else {
                const double first = 8.0 * p * std::pow(m, p - 1.0) * std::pow(rho, m - 1.0);
                remainder = first / (1.0 - ratio);
            }
        }
    }
    if (!(remainder <= 0.01 * value))
        throw NonErgodicError("coupling_moment: certified remainder exceeds 1% of the point "
                              "value; increase the tail horizon");
    return CouplingMoment{value, remainder};
}

}  // namespace mixbound
