#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixbound/poisson_variance.hpp"
#include "mixbound/simd/kernels.hpp"
#include "test_util.hpp"

using namespace mixbound;

TEST_CASE("geometric tail sum matches brute force") {
    for (std::uint64_t tau : {1, 2, 3, 7}) {
        for (std::uint64_t k : {0, 1, 2, 5, 10, 23}) {
            double brute = 0.0;
            for (std::uint64_t j = k + 1; j < k + 4000; ++j)
                brute += std::pow(0.25, static_cast<double>(j / tau));
            CHECK(geometric_tail_sum(k, tau) == doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

TEST_CASE("two-state Poisson solution has the closed form g = fbar/(p+q)") {
    const double p = 0.3, q = 0.3;
    const StochasticKernel k = testutil::two_state_kernel(p, q);
    const Distribution pi = stationary_distribution(k);
    const std::vector<double> f{1.0, 0.0};

    const PoissonSolution direct = solve_poisson_direct(k, f, pi);
    CHECK(direct.g[0] == doctest::Approx(0.5 / (p + q)).epsilon(1e-12));
    CHECK(direct.g[1] == doctest::Approx(-0.5 / (p + q)).epsilon(1e-12));
    CHECK(direct.residual <= 1e-10);
    CHECK(std::fabs(expectation(pi, direct.g)) <= 1e-10);

    const PoissonSolution series = solve_poisson_series(k, f, pi);
    CHECK(series.residual <= 1e-10);
    for (int z = 0; z < 2; ++z)
        CHECK(std::fabs(series.g[z] - direct.g[z]) <= 1e-9);
}

TEST_CASE("iid kernel gives g = fbar; constant f gives g = 0") {
    const std::vector<double> mu{0.2, 0.5, 0.3};
    const StochasticKernel k = testutil::iid_kernel(mu);
    const Distribution pi = stationary_distribution(k);

    const std::vector<double> f{1.0, -0.5, 0.25};
    const std::vector<double> fbar = centered(f, pi);
    for (const auto& sol : {solve_poisson_direct(k, f, pi), solve_poisson_series(k, f, pi)}) {
        for (std::size_t z = 0; z < 3; ++z) CHECK(sol.g[z] == doctest::Approx(fbar[z]));
    }

    const std::vector<double> constant(3, 0.7);
    const PoissonSolution zero = solve_poisson_direct(k, constant, pi);
    CHECK(simd::max_abs(zero.g) <= 1e-12);
    CHECK(asymptotic_variance_series(k, constant, pi) == 0.0);
    CHECK(std::fabs(asymptotic_variance_poisson(constant, zero.g, pi)) <= 1e-12);
}

TEST_CASE("solvers agree and satisfy the sup-norm cap on random chains") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const std::uint64_t size = 2 + seed % 19;
        const StochasticKernel k = testutil::doeblin_kernel(size, 0.3 + 0.02 * (seed % 10), seed);
        const Distribution pi = stationary_distribution(k);
        const std::vector<double> f = testutil::random_f(size, seed);
        const MixingProfile mp = mixing_time(k);
        REQUIRE(mp.tau.has_value());

        const PoissonSolution direct = solve_poisson_direct(k, f, pi);
        const PoissonSolution series = solve_poisson_series(k, f, pi);
        CHECK(direct.residual <= 1e-10);
        CHECK(series.residual <= 1e-10);
        CHECK(std::fabs(expectation(pi, direct.g)) <= 1e-10);
        CHECK(std::fabs(expectation(pi, series.g)) <= 1e-10);
        CHECK(simd::max_abs_diff(direct.g, series.g) <= 1e-9);

        const double cap =
            (8.0 / 3.0) * static_cast<double>(*mp.tau) * simd::max_abs(f) + 1e-9;
        CHECK(direct.sup_norm <= cap);
        CHECK(series.sup_norm <= cap);
    }
}

TEST_CASE("asymptotic variance: closed form and route agreement") {
    const double p = 0.3, q = 0.3;
    const StochasticKernel k = testutil::two_state_kernel(p, q);
    const Distribution pi = stationary_distribution(k);
    const std::vector<double> f{1.0, 0.0};

    const double closed_form = p * q * (2.0 - p - q) / std::pow(p + q, 3.0);
    const double series = asymptotic_variance_series(k, f, pi);
    CHECK(series == doctest::Approx(closed_form).epsilon(1e-10));
    CHECK(series == doctest::Approx(0.583333333333).epsilon(1e-9));

    const PoissonSolution sol = solve_poisson_direct(k, f, pi);
    const double via_poisson = asymptotic_variance_poisson(f, sol.g, pi);
    CHECK(std::fabs(via_poisson - series) <= 1e-8);

    // iid: variance reduces to pi(fbar^2)
    const StochasticKernel iid = testutil::iid_kernel({0.25, 0.75});
    const Distribution pi2 = stationary_distribution(iid);
    const std::vector<double> f2{1.0, 0.0};
    const std::vector<double> g2 = centered(f2, pi2);
    const double var = simd::weighted_dot(pi2.weights(), g2, g2);
    CHECK(asymptotic_variance_series(iid, f2, pi2) == doctest::Approx(var));
    CHECK(asymptotic_variance_poisson(f2, g2, pi2) == doctest::Approx(var));
}

TEST_CASE("variance routes agree on random chains and stay nonnegative") {
    for (std::uint64_t seed = 40; seed <= 60; ++seed) {
        const std::uint64_t size = 2 + seed % 12;
        const StochasticKernel k = testutil::doeblin_kernel(size, 0.35, seed);
        const Distribution pi = stationary_distribution(k);
        const std::vector<double> f = testutil::random_f(size, seed);

        const double series = asymptotic_variance_series(k, f, pi);
        const PoissonSolution sol = solve_poisson_direct(k, f, pi);
        const double poisson = asymptotic_variance_poisson(f, sol.g, pi);
        CHECK(std::fabs(series - poisson) <= 1e-8);
        CHECK(series >= -1e-10);
        CHECK(poisson >= -1e-10);

        // pi(g_1) equals the asymptotic variance
        const DecompositionLevel level = decomposition_level(k, sol.g, pi, 1);
        CHECK(std::fabs(expectation(pi, level.g_k) - series) <= 1e-8);
    }
}

TEST_CASE("decomposition levels: mean identity, pointwise identity, norm cap") {
    for (std::uint64_t seed = 70; seed <= 76; ++seed) {
        const std::uint64_t size = 2 + seed % 8;
        const StochasticKernel k = testutil::doeblin_kernel(size, 0.4, seed);
        const Distribution pi = stationary_distribution(k);
        // scale f so the solution has sup-norm at most 1; the mean identity
        // is scale-covariant and its absolute tolerance presumes O(1) levels
        std::vector<double> f = testutil::random_f(size, seed);
        {
            const PoissonSolution probe = solve_poisson_direct(k, f, pi);
            const double scale = std::max(1.0, probe.sup_norm);
            for (auto& v : f) v /= scale;
        }
        const PoissonSolution sol = solve_poisson_direct(k, f, pi);
        const MixingProfile mp = mixing_time(k);
        REQUIRE(mp.tau.has_value());

        std::vector<double> qg(size, 0.0);
        matvec(k.matrix(), sol.g, qg);

        for (std::uint32_t level_k = 1; level_k <= 6; ++level_k) {
            const DecompositionLevel level = decomposition_level(k, sol.g, pi, level_k);
            CHECK(std::fabs(expectation(pi, level.g_k) - expectation(pi, level.h_k)) <= 1e-10);

            // h_k - g_k = g^{2^k} - Q g^{2^k}
            std::vector<double> g_pow(sol.g.begin(), sol.g.end());
            for (std::uint32_t s = 0; s < level_k; ++s)
                for (auto& v : g_pow) v *= v;
            std::vector<double> qg_pow(size, 0.0);
            matvec(k.matrix(), g_pow, qg_pow);
            for (std::size_t z = 0; z < size; ++z)
                CHECK(level.h_k[z] - level.g_k[z] ==
                      doctest::Approx(g_pow[z] - qg_pow[z]).epsilon(1e-9));

            if (level_k <= 4) {
                // telescoping factorization (g - Qg) prod (g^{2^j} + (Qg)^{2^j})
                std::vector<double> product(size);
                for (std::size_t z = 0; z < size; ++z) product[z] = sol.g[z] - qg[z];
                std::vector<double> gp(sol.g.begin(), sol.g.end());
                std::vector<double> qgp = qg;
                for (std::uint32_t j = 0; j < level_k; ++j) {
                    for (std::size_t z = 0; z < size; ++z) product[z] *= gp[z] + qgp[z];
                    for (std::size_t z = 0; z < size; ++z) {
                        gp[z] *= gp[z];
                        qgp[z] *= qgp[z];
                    }
                }
                for (std::size_t z = 0; z < size; ++z)
                    CHECK(std::fabs(product[z] - level.h_k[z]) <=
                          1e-9 * std::max(1.0, std::fabs(level.h_k[z])));

                const double exponent = std::exp2(static_cast<double>(level_k)) - 1.0;
                const double cap =
                    std::exp2(static_cast<double>(level_k) - 1.0) *
                        std::pow((8.0 / 3.0) * static_cast<double>(*mp.tau), exponent) +
                    1e-6;
                CHECK(level.sup_h <= cap);
            }
        }
    }
}

TEST_CASE("mean identity holds relative to the power magnitude on unscaled chains") {
    for (std::uint64_t seed = 80; seed <= 84; ++seed) {
        const std::uint64_t size = 3 + seed % 5;
        const StochasticKernel k = testutil::doeblin_kernel(size, 0.35, seed);
        const Distribution pi = stationary_distribution(k);
        const std::vector<double> f = testutil::random_f(size, seed);
        const PoissonSolution sol = solve_poisson_direct(k, f, pi);
        for (std::uint32_t level_k = 1; level_k <= 6; ++level_k) {
            const DecompositionLevel level = decomposition_level(k, sol.g, pi, level_k);
            const double magnitude =
                std::pow(sol.sup_norm, std::exp2(static_cast<double>(level_k)));
            CHECK(std::fabs(expectation(pi, level.g_k) - expectation(pi, level.h_k)) <=
                  1e-12 * (1.0 + magnitude));
        }
    }
}

TEST_CASE("decomposition level for the iid kernel collapses") {
    const StochasticKernel k = testutil::iid_kernel({0.4, 0.6});
    const Distribution pi = stationary_distribution(k);
    const std::vector<double> f{1.0, 0.0};
    const PoissonSolution sol = solve_poisson_direct(k, f, pi);  // g = fbar
    const DecompositionLevel level = decomposition_level(k, sol.g, pi, 1);
    const std::vector<double> fbar = centered(f, pi);
    const double var = simd::weighted_dot(pi.weights(), fbar, fbar);
    for (std::size_t z = 0; z < 2; ++z) {
        CHECK(level.g_k[z] == doctest::Approx(var));           // Q(fbar^2) is constant
        CHECK(level.h_k[z] == doctest::Approx(fbar[z] * fbar[z]));
    }
}

TEST_CASE("decomposition level range guard") {
    const StochasticKernel k = testutil::two_state_kernel(0.3, 0.3);
    const Distribution pi = stationary_distribution(k);
    const PoissonSolution sol = solve_poisson_direct(k, std::vector<double>{1.0, 0.0}, pi);
    CHECK_THROWS_AS(decomposition_level(k, sol.g, pi, 0), ValidationError);
    CHECK_THROWS_AS(decomposition_level(k, sol.g, pi, 17), ValidationError);
}

TEST_CASE("series solver rejects non-mixing kernels") {
    const StochasticKernel id = validate_kernel(Matrix::identity(3));
    const Distribution uniform = Distribution::uniform(3);
    CHECK_THROWS_AS(solve_poisson_series(id, std::vector<double>{1, 0, 0}, uniform),
                    NonErgodicError);
}
