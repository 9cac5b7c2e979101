#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixbound/bound_calculus.hpp"
#include "mixbound/chain_spec.hpp"
#include "mixbound/exact_analysis.hpp"
#include "mixbound/mc_harness.hpp"
#include "mixbound/poisson_variance.hpp"
#include "test_util.hpp"

using namespace mixbound;

namespace {

ChainModel two_state_model(std::optional<Distribution> initial = std::nullopt) {
    return make_chain_model(testutil::two_state_kernel(0.3, 0.3), {1.0, 0.0},
                            std::move(initial));
}

}  // namespace

TEST_CASE("simulation is deterministic in the seed, not the schedule") {
    const ChainModel model = two_state_model();
    const Distribution pi = stationary_distribution(model.kernel);
    const std::vector<double> fbar = centered(model.f, pi);

    const auto a = additive_path_sums(model, fbar, 50, 400, 99, 1);
    const auto b = additive_path_sums(model, fbar, 50, 400, 99, 1);
    const auto c = additive_path_sums(model, fbar, 50, 400, 99, 8);
    CHECK(a == b);
    CHECK(a == c);
    const auto other_seed = additive_path_sums(model, fbar, 50, 400, 100, 1);
    CHECK(a != other_seed);

    const auto paths1 = simulate_paths(model, 20, 50, 7);
    const auto paths2 = simulate_paths(model, 20, 50, 7);
    CHECK(paths1 == paths2);
}

TEST_CASE("single-step paths start where they should") {
    const ChainModel model = two_state_model(Distribution::point_mass(1, 2));
    for (const auto& path : simulate_paths(model, 1, 300, 5)) {
        REQUIRE(path.size() == 1);
        CHECK(path[0] == 1);
    }
}

TEST_CASE("iid marginal frequencies match the target law") {
    const std::vector<double> mu{0.2, 0.5, 0.3};
    const ChainModel model = make_chain_model(testutil::iid_kernel(mu), {1.0, 0.0, 0.0},
                                              std::nullopt);
    const std::uint64_t draws = 100'000;
    const auto paths = simulate_paths(model, 1, draws, 31);
    std::vector<double> freq(3, 0.0);
    for (const auto& path : paths) freq[path[0]] += 1.0;
    for (auto& v : freq) v /= static_cast<double>(draws);
    for (std::size_t i = 0; i < 3; ++i) {
        const double band = 4.0 * std::sqrt(mu[i] * (1.0 - mu[i]) / static_cast<double>(draws));
        CHECK(std::fabs(freq[i] - mu[i]) <= band);
    }
}

TEST_CASE("moment estimate squares up against the exact second moment") {
    const ChainModel model = two_state_model();
    const Distribution pi = stationary_distribution(model.kernel);
    const std::uint64_t n = 100;

    const MomentEstimate est = estimate_moment(model, n, 2.0, 20'000, 123, 4);
    const double exact_root = std::sqrt(exact_second_moment(model.kernel, model.f, pi, n));
    CHECK(std::fabs(est.value - exact_root) <= 4.0 * est.std_error + 1e-9);
    CHECK(est.std_error > 0.0);
    CHECK(est.replications == 20'000);
}

TEST_CASE("constant f gives exactly zero estimates") {
    const ChainModel model = make_chain_model(testutil::two_state_kernel(0.3, 0.3), {0.4, 0.4},
                                              std::nullopt);
    const MomentEstimate est = estimate_moment(model, 50, 4.0, 500, 1);
    CHECK(est.value == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("empirical moments are ordered in p on shared trajectories") {
    const ChainModel model = two_state_model();
    // same seed => same trajectories => the power-mean ordering is exact
    const MomentEstimate second = estimate_moment(model, 200, 2.0, 2'000, 77);
    const MomentEstimate fourth = estimate_moment(model, 200, 4.0, 2'000, 77);
    CHECK(second.value <= fourth.value * (1.0 + 1e-12));
}

TEST_CASE("moment overflow guard trips on huge powers") {
    // |S_1| = 5e5 exactly, so p ln(max) = 60 ln(5e5) > 700
    const ChainModel model = make_chain_model(testutil::two_state_kernel(0.3, 0.3),
                                              {1e6, 0.0}, std::nullopt);
    CHECK_THROWS_AS(estimate_moment(model, 1, 60.0, 200, 3), ValidationError);
    CHECK_NOTHROW(estimate_moment(model, 1, 16.0, 200, 3));
}

TEST_CASE("tail estimates") {
    const ChainModel model = two_state_model();
    CHECK(estimate_tail(model, 100, 0.0, 500, 3) == 1.0);
    // |S_n| can never exceed n ||fbar||_inf = 50
    CHECK(estimate_tail(model, 100, 51.0, 500, 3) == 0.0);
}

TEST_CASE("R_{k,s} estimate cross-checks against the exact second moment") {
    // Level sums at k = s-1 have moment order 2, where the exact route is
    // available: R^2 = sqrt(E[ |sum|^2 ]).
    const std::uint64_t seed = 4242;
    const ChainModel model = make_chain_model(testutil::doeblin_kernel(3, 0.5, seed),
                                              testutil::random_f(3, seed), std::nullopt);
    const Distribution pi = stationary_distribution(model.kernel);
    const PoissonSolution sol = solve_poisson_direct(model.kernel, model.f, pi);
    const std::uint64_t n = 60;

    const std::uint32_t s = 3, k = s - 1;
    const MomentEstimate est = estimate_R_ks(model, n, k, s, 40'000, 9, 4);
    const DecompositionLevel level = decomposition_level(model.kernel, sol.g, pi, k);
    const double exact =
        std::pow(exact_second_moment(model.kernel, level.g_k, pi, n), 0.25);
    CHECK(std::fabs(est.value - exact) <= 4.0 * est.std_error + 1e-9);
}

TEST_CASE("level sums vanish for constant f") {
    const ChainModel model = make_chain_model(testutil::two_state_kernel(0.3, 0.3), {1.0, 1.0},
                                              std::nullopt);
    const MomentEstimate est = estimate_R_ks(model, 50, 1, 3, 500, 11);
    CHECK(est.value <= 1e-12);
}

TEST_CASE("moment recursion inequality holds empirically") {
    const std::uint64_t seed = 515;
    const ChainModel model = make_chain_model(testutil::doeblin_kernel(3, 0.5, seed),
                                              testutil::random_f(3, seed), std::nullopt);
    const MixingProfile mp = mixing_time(model.kernel);
    REQUIRE(mp.tau.has_value());
    const std::uint64_t n = 100;

    for (const auto& [k, s] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {1, 2}, {1, 3}, {2, 3}}) {
        const MomentEstimate lhs = estimate_R_ks(model, n, k, s, 20'000, 21, 4);
        const MomentEstimate next = estimate_R_ks(model, n, k + 1, s, 20'000, 22, 4);
        const double rhs = bounds::moment_recursion_rhs(k, s, n, *mp.tau, next.value);
        // first-order propagation of the next-level error through sqrt
        const double combined_se =
            lhs.std_error + (next.value > 0.0
                                 ? 0.5 * rhs / next.value * next.std_error
                                 : 0.0);
        CHECK(lhs.value <= rhs + 3.0 * combined_se);
    }
}

TEST_CASE("certify holds on the default grid and is schedule-invariant") {
    const ChainModel model = two_state_model(Distribution::point_mass(0, 2));
    CertifyConfig config;
    config.replications = 2'000;
    config.seed = 31337;
    config.threads = 1;

    const CertifyResult serial = certify(model, config);
    CHECK(serial.all_hold);
    CHECK(serial.tau == 2);
    CHECK(serial.sigma == doctest::Approx(std::sqrt(0.5833333333)).epsilon(1e-6));

    // expected grid: 3n x (3p x {rosenthal_pi, aux} + 2 exact + 2 bernstein + 3p xi)
    CHECK(serial.verdicts.size() == 3 * (3 * 2 + 2 + 2 + 3));

    config.threads = 8;
    const CertifyResult parallel = certify(model, config);
    REQUIRE(parallel.verdicts.size() == serial.verdicts.size());
    for (std::size_t i = 0; i < serial.verdicts.size(); ++i) {
        CHECK(serial.verdicts[i].bound_name == parallel.verdicts[i].bound_name);
        CHECK(serial.verdicts[i].empirical_value == parallel.verdicts[i].empirical_value);
        CHECK(serial.verdicts[i].bound_value == parallel.verdicts[i].bound_value);
    }

    for (const Verdict& v : serial.verdicts) {
        CHECK(v.holds);
        if (v.empirical_value > 0.0) CHECK(v.ratio > 1.0);
    }
}

TEST_CASE("certify rescales an oversized test function") {
    ChainModel model = make_chain_model(testutil::two_state_kernel(0.3, 0.3), {5.0, 0.0},
                                        std::nullopt);
    CertifyConfig config;
    config.replications = 500;
    config.seed = 5;
    const CertifyResult result = certify(model, config);
    CHECK(result.all_hold);
    // rescaled indicator has the same sigma as the unit one
    CHECK(result.sigma == doctest::Approx(std::sqrt(0.5833333333)).epsilon(1e-6));
}

TEST_CASE("certify rejects bad configurations") {
    const ChainModel model = two_state_model();
    CertifyConfig config;
    config.replications = 10;
    CHECK_THROWS_AS(certify(model, config), ValidationError);
    config.replications = 1000;
    config.p_list = {1.5};
    CHECK_THROWS_AS(certify(model, config), ValidationError);
    config.p_list = {2.0};
    config.delta_list = {0.5};
    CHECK_THROWS_AS(certify(model, config), ValidationError);
}

TEST_CASE("variance of the mean scales with tau/n across the lazy family") {
    const double cap_constant = std::pow(1.0 + 4.0 / std::sqrt(3.0), 2.0);
    const std::uint64_t n = 1000;
    const ChainSpecFile base = generate_two_state(0.3, 0.3);
    for (double lambda : {0.0, 0.5, 0.75}) {
        const ChainSpecFile spec = generate_lazy(base, lambda);
        const ChainModel model = to_model(spec);
        const MixingProfile mp = mixing_time(model.kernel);
        REQUIRE(mp.tau.has_value());

        const MomentEstimate est = estimate_moment(model, n, 2.0, 4'000, 2024, 4);
        const double mean_square = est.value * est.value / static_cast<double>(n * n);
        const double se_scale = 2.0 * est.value * est.std_error / static_cast<double>(n * n);
        const double cap =
            cap_constant * static_cast<double>(*mp.tau) / static_cast<double>(n);
        CHECK(mean_square <= cap + 3.0 * se_scale);
    }
}
