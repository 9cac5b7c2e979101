#include "mixbound/kernel_core.hpp"

#include <cmath>
#include <limits>

#include "mixbound/simd/kernels.hpp"

namespace mixbound {

namespace {

constexpr double kMassTolerance = 1e-9;

void check_probability_row(std::span<const double> row, const std::string& what) {
    double total = 0.0;
    for (double v : row) {
        if (!std::isfinite(v)) throw ValidationError(what + ": non-finite entry");
        if (v < 0.0) throw ValidationError(what + ": negative entry");
        total += v;
    }
    if (std::fabs(total - 1.0) > kMassTolerance)
        throw ValidationError(what + ": mass " + std::to_string(total) + " deviates from 1");
}

void renormalize(std::span<double> row) {
    const double total = simd::sum(row);
    for (double& v : row) v /= total;
}

}  // namespace

Distribution Distribution::validate(std::vector<double> weights) {
    if (weights.empty()) throw ValidationError("distribution: empty weight vector");
    check_probability_row(weights, "distribution");
    renormalize(weights);
    return Distribution(std::move(weights));
}

Distribution Distribution::point_mass(std::size_t state, std::size_t size) {
    if (state >= size) throw ValidationError("point_mass: state out of range");
    std::vector<double> w(size, 0.0);
    w[state] = 1.0;
    return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t size) {
    if (size == 0) throw ValidationError("uniform: empty state space");
    return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

StochasticKernel StochasticKernel::validate(Matrix rows) {
    if (rows.rows() == 0 || rows.rows() != rows.cols())
        throw ValidationError("kernel: matrix must be square and non-empty");
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        check_probability_row(rows.row(i), "kernel row " + std::to_string(i));
        renormalize(rows.row(i));
    }
    return StochasticKernel(std::move(rows));
}

ChainModel make_chain_model(StochasticKernel kernel, std::vector<double> f,
                            std::optional<Distribution> initial) {
    if (f.size() != kernel.size())
        throw ValidationError("chain model: f length differs from state count");
    for (double v : f)
        if (!std::isfinite(v)) throw ValidationError("chain model: non-finite f entry");
    if (initial && initial->size() != kernel.size())
        throw ValidationError("chain model: initial distribution length differs from state count");
    return ChainModel{std::move(kernel), std::move(f), std::move(initial)};
}

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() != nu.size()) throw ValidationError("tv_distance: length mismatch");
    return simd::half_l1_diff(mu, nu);
}

double tv_distance(const Distribution& mu, const Distribution& nu) {
    return tv_distance(mu.weights(), nu.weights());
}

double dobrushin_of_matrix(const Matrix& qt) {
    double worst = 0.0;
    for (std::size_t i = 0; i < qt.rows(); ++i)
        for (std::size_t j = i + 1; j < qt.rows(); ++j)
            worst = std::max(worst, simd::half_l1_diff(qt.row(i), qt.row(j)));
    return worst;
}

double dobrushin_coefficient(const StochasticKernel& q, std::uint64_t t) {
    if (t == 0) throw ValidationError("dobrushin_coefficient: t must be >= 1");
    if (t > kMaxKernelPower) throw ValidationError("dobrushin_coefficient: t exceeds power cap");
    return dobrushin_of_matrix(matpow(q.matrix(), t));
}

MixingProfile mixing_time(const StochasticKernel& q, std::uint64_t horizon) {
    if (horizon == 0) throw ValidationError("mixing_time: horizon must be >= 1");
    if (horizon > kMaxKernelPower) throw ValidationError("mixing_time: horizon exceeds power cap");
    MixingProfile profile;
    Matrix power = q.matrix();
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        if (t > 1) power = matmul(power, q.matrix());
        const double delta = dobrushin_of_matrix(power);
        profile.deltas.push_back(delta);
        if (delta <= 0.25) {
            profile.tau = t;
            break;
        }
    }
    return profile;
}

Distribution stationary_distribution(const StochasticKernel& q) {
    const std::size_t n = q.size();
    const Matrix& qm = q.matrix();

    // (Q^T - I) pi = 0 with the redundant equation swapped for sum(pi) = 1.
    // The all-ones row combination of Q^T - I vanishes, so dropping the last
    // equation loses nothing; the swapped system is nonsingular exactly when
    // the fixed-point eigenspace is one-dimensional.
    Matrix a(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = qm(j, i) - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    std::vector<double> b(n, 0.0);
    b[n - 1] = 1.0;

    std::vector<double> pi;
    try {
        pi = lu_solve(std::move(a), std::move(b), 1e-8);
    } catch (const SingularMatrixError&) {
        throw NonErgodicError("stationary_distribution: invariant distribution not unique");
    }

    for (double& v : pi) {
        if (v < -1e-9) throw NonErgodicError("stationary_distribution: negative solution entry");
        if (v < 0.0) v = 0.0;
    }
    Distribution result = Distribution::validate(std::move(pi));

    // Fixed-point residual of the direct solve.
    std::vector<double> step(n, 0.0);
    vecmat(result.weights(), qm, step);
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual += std::fabs(step[j] - result[j]);
    if (residual > 1e-10)
        throw NonErgodicError("stationary_distribution: fixed-point residual " +
                              std::to_string(residual));

    // Cross-check: damped power iteration (the half-lazy kernel shares the
    // fixed points of Q and cannot oscillate). Disagreement between two
    // converged fixed points signals a degenerate eigenspace that slipped
    // past the pivot test.
    std::vector<double> iterate(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n, 0.0);
    for (std::uint64_t it = 0; it < 1'000'000; ++it) {
        vecmat(iterate, qm, next);
        for (std::size_t j = 0; j < n; ++j) next[j] = 0.5 * (next[j] + iterate[j]);
        double change = 0.0;
        for (std::size_t j = 0; j < n; ++j) change += std::fabs(next[j] - iterate[j]);
        iterate.swap(next);
        if (change <= 1e-13) {
            double gap = 0.0;
            for (std::size_t j = 0; j < n; ++j) gap += std::fabs(iterate[j] - result[j]);
            if (gap > 1e-8)
                throw NonErgodicError(
                    "stationary_distribution: power-iteration fixed point disagrees "
                    "with the direct solve");
            break;
        }
    }
    return result;
}

std::vector<double> kernel_power_apply(const StochasticKernel& q, std::span<const double> v,
                                       std::uint64_t t) {
    if (v.size() != q.size()) throw ValidationError("kernel_power_apply: length mismatch");
    std::vector<double> current(v.begin(), v.end());
    std::vector<double> next(v.size(), 0.0);
    for (std::uint64_t step = 0; step < t; ++step) {
        matvec(q.matrix(), current, next);
        current.swap(next);
    }
    return current;
}

double expectation(const Distribution& pi, std::span<const double> v) {
    if (v.size() != pi.size()) throw ValidationError("expectation: length mismatch");
    return simd::dot(pi.weights(), v);
}

std::vector<double> centered(std::span<const double> v, const Distribution& pi) {
    const double mean = expectation(pi, v);
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x -= mean;
    return out;
}

}  // namespace mixbound
