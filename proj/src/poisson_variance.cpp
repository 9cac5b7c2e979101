#include "mixbound/poisson_variance.hpp"

#include <cmath>

#include "mixbound/simd/kernels.hpp"

namespace mixbound {

namespace {

constexpr std::uint64_t kMaxSeriesTerms = 1'000'000;

std::uint64_t require_tau(const StochasticKernel& q) {
    const MixingProfile profile = mixing_time(q);
    if (!profile.tau) throw NonErgodicError("chain does not mix within the default horizon");
    return *profile.tau;
}

double poisson_residual(const StochasticKernel& q, std::span<const double> g,
                        std::span<const double> fbar) {
    std::vector<double> qg(g.size(), 0.0);
    matvec(q.matrix(), g, qg);
    double worst = 0.0;
    for (std::size_t z = 0; z < g.size(); ++z)
        worst = std::max(worst, std::fabs(g[z] - qg[z] - fbar[z]));
    return worst;
}

void recenter(std::vector<double>& g, const Distribution& pi) {
    const double mean = expectation(pi, g);
    for (double& v : g) v -= mean;
}

}  // namespace

double geometric_tail_sum(std::uint64_t k, std::uint64_t tau) {
    // sum_{j>k} (1/4)^{floor(j/tau)}: split the first partial block of
    // length tau - r, then full blocks of length tau.
    const std::uint64_t a = (k + 1) / tau;
    const std::uint64_t r = (k + 1) - a * tau;
    const double quarter_a = std::pow(0.25, static_cast<double>(a));
    return quarter_a * (static_cast<double>(tau - r) + static_cast<double>(tau) / 3.0);
}

PoissonSolution solve_poisson_direct(const StochasticKernel& q, std::span<const double> f,
                                     const Distribution& pi) {
    const std::size_t n = q.size();
    if (f.size() != n) throw ValidationError("solve_poisson_direct: f length mismatch");

    const std::vector<double> fbar = centered(f, pi);

    // Build (I - Q) and replace the row with the heaviest stationary weight
    // by the normalization constraint pi . g = 0; that row is redundant in
    // the singular system whenever pi is a genuine fixed point.
    std::size_t swap_row = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (pi[i] > pi[swap_row]) swap_row = i;

    Matrix a(n, n);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == swap_row) {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = pi[j];
            b[i] = 0.0;
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - q.matrix()(i, j);
        b[i] = fbar[i];
    }

    std::vector<double> g;
    try {
        g = lu_solve(std::move(a), std::move(b));
    } catch (const SingularMatrixError&) {
        throw NonErgodicError("solve_poisson_direct: system singular beyond the rank-one "
                              "degeneracy; kernel is not uniquely ergodic");
    }
    recenter(g, pi);

    PoissonSolution sol{std::move(g), 0.0, 0.0, PoissonMethod::direct_solve};
    sol.residual = poisson_residual(q, sol.g, fbar);
    sol.sup_norm = simd::max_abs(sol.g);
    if (sol.residual > 1e-8)
        throw NonErgodicError("solve_poisson_direct: residual " + std::to_string(sol.residual));
    return sol;
}

PoissonSolution solve_poisson_series(const StochasticKernel& q, std::span<const double> f,
                                     const Distribution& pi, double tol) {
    const std::size_t n = q.size();
    if (f.size() != n) throw ValidationError("solve_poisson_series: f length mismatch");
    if (tol <= 0.0) throw ValidationError("solve_poisson_series: tol must be positive");

    const std::uint64_t tau = require_tau(q);
    const double f_sup = simd::max_abs(f);
    const double pif = expectation(pi, f);

    // Accumulate sum_{k=0..K} (Q^k f - pi(f)) until the a-priori geometric
    // tail bound 2 ||f||_inf sum_{j>K} (1/4)^{floor(j/tau)} drops below tol.
    std::vector<double> g(n, 0.0);
    std::vector<double> term(f.begin(), f.end());
    std::vector<double> next(n, 0.0);
    std::uint64_t k = 0;
    while (true) {
        for (std::size_t z = 0; z < n; ++z) g[z] += term[z] - pif;
        if (2.0 * f_sup * geometric_tail_sum(k, tau) <= tol) break;
        if (++k > kMaxSeriesTerms)
            throw NonErgodicError("solve_poisson_series: truncation index exceeded cap");
        matvec(q.matrix(), term, next);
        term.swap(next);
    }
    recenter(g, pi);

    PoissonSolution sol{std::move(g), 0.0, 0.0, PoissonMethod::series};
    sol.residual = poisson_residual(q, sol.g, centered(f, pi));
    sol.sup_norm = simd::max_abs(sol.g);
    return sol;
}

double asymptotic_variance_series(const StochasticKernel& q, std::span<const double> f,
                                  const Distribution& pi, double tol) {
    const std::size_t n = q.size();
    if (f.size() != n) throw ValidationError("asymptotic_variance_series: f length mismatch");
    if (tol <= 0.0) throw ValidationError("asymptotic_variance_series: tol must be positive");

    const std::uint64_t tau = require_tau(q);
    const std::vector<double> fbar = centered(f, pi);
    const double f_sup = simd::max_abs(f);
    const double fbar_sup = simd::max_abs(fbar);

    double variance = simd::weighted_dot(pi.weights(), fbar, fbar);
    std::vector<double> term = fbar;
    std::vector<double> next(n, 0.0);
    std::uint64_t lag = 0;
    // |pi(fbar . Q^l fbar)| <= ||fbar||_inf 2 ||f||_inf (1/4)^{floor(l/tau)}
    while (2.0 * fbar_sup * 2.0 * f_sup * geometric_tail_sum(lag, tau) > tol) {
        if (++lag > kMaxSeriesTerms)
            throw NonErgodicError("asymptotic_variance_series: truncation index exceeded cap");
        matvec(q.matrix(), term, next);
        term.swap(next);
        variance += 2.0 * simd::weighted_dot(pi.weights(), fbar, term);
    }
    if (variance < 0.0) {
        if (variance < -tol)
            throw NonErgodicError("asymptotic_variance_series: negative variance beyond tol");
        variance = 0.0;
    }
    return variance;
}

double asymptotic_variance_poisson(std::span<const double> f, std::span<const double> g,
                                   const Distribution& pi) {
    if (f.size() != pi.size() || g.size() != pi.size())
        throw ValidationError("asymptotic_variance_poisson: length mismatch");
    const std::vector<double> fbar = centered(f, pi);
    std::vector<double> two_g_minus_fbar(g.begin(), g.end());
    for (std::size_t z = 0; z < fbar.size(); ++z)
        two_g_minus_fbar[z] = 2.0 * two_g_minus_fbar[z] - fbar[z];
    const double value = simd::weighted_dot(pi.weights(), fbar, two_g_minus_fbar);
    return value < 0.0 && value > -1e-12 ? 0.0 : value;
}

DecompositionLevel decomposition_level(const StochasticKernel& q, std::span<const double> g,
                                       const Distribution& pi, std::uint32_t k) {
    const std::size_t n = q.size();
    if (g.size() != n) throw ValidationError("decomposition_level: g length mismatch");
    if (k < 1 || k > kMaxDecompositionLevel)
        throw ValidationError("decomposition_level: k out of range [1, 16]");

    std::vector<double> qg(n, 0.0);
    matvec(q.matrix(), g, qg);

    // x^{2^k} by k squarings
    std::vector<double> g_pow(g.begin(), g.end());
    std::vector<double> qg_pow = qg;
    for (std::uint32_t step = 0; step < k; ++step) {
        for (std::size_t z = 0; z < n; ++z) {
            g_pow[z] *= g_pow[z];
            qg_pow[z] *= qg_pow[z];
        }
    }

    DecompositionLevel level;
    level.k = k;
    level.g_k.resize(n);
    level.h_k.resize(n);
    matvec(q.matrix(), g_pow, level.g_k);
    for (std::size_t z = 0; z < n; ++z) {
        level.g_k[z] -= qg_pow[z];
        level.h_k[z] = g_pow[z] - qg_pow[z];
    }
    level.sup_h = simd::max_abs(level.h_k);

    // pi(g_k) = pi(h_k) holds because pi is invariant; a violation here means
    // the inputs were inconsistent (g not from this kernel / pi not invariant).
    // Roundoff in the difference scales with the iterated powers, not with h.
    const double mean_gap =
        std::fabs(expectation(pi, level.g_k) - expectation(pi, level.h_k));
    const double scale = std::max(1.0, simd::max_abs(g_pow));
    if (mean_gap > 1e-9 * scale)
        throw ValidationError("decomposition_level: stationary means of g_k and h_k disagree");
    return level;
}

}  // namespace mixbound
