// mixbound command-line front end.
//
//   analyze   mixing/variance diagnostics for a chain spec
//   certify   bound-vs-empirical grid, CSV/JSON report, exit 1 on violation
//   bound     closed-form bound evaluation from numeric flags
//   generate  emit a chain spec for a built-in family
//
// Exit codes: 0 success / all verdicts hold, 1 bound violation, 2 usage or
// input errors (including chains that do not mix within the horizon).

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mixbound/bound_calculus.hpp"
#include "mixbound/chain_spec.hpp"
#include "mixbound/exact_analysis.hpp"
#include "mixbound/mc_harness.hpp"
#include "mixbound/poisson_variance.hpp"
#include "mixbound/report.hpp"
#include "mixbound/simd/kernels.hpp"

#include <json.hpp>

namespace {

constexpr std::uint64_t kFallbackSeed = 20240817;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MIXBOUND_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || errno == ERANGE)
            throw mixbound::ValidationError("MIXBOUND_SEED must be an unsigned integer");
        return v;
    }
    return kFallbackSeed;
}

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", v);
    return buffer;
}

int run_analyze(const std::string& spec_path, std::uint64_t horizon, bool as_json) {
    const mixbound::ChainSpecFile spec = mixbound::load_chain_spec(spec_path);
    const mixbound::ChainModel model = mixbound::to_model(spec);

    const mixbound::MixingProfile mix = mixbound::mixing_time(model.kernel, horizon);
    if (!mix.tau) {
        std::cerr << "error: chain '" << spec.name << "' has no contraction time within horizon "
                  << horizon << " (Dobrushin coefficient stayed above 1/4)\n";
        return 2;
    }
    const mixbound::Distribution pi = mixbound::stationary_distribution(model.kernel);
    const mixbound::PoissonSolution direct =
        mixbound::solve_poisson_direct(model.kernel, model.f, pi);
    const double sigma2_series =
        mixbound::asymptotic_variance_series(model.kernel, model.f, pi);
    const double sigma2_poisson = mixbound::asymptotic_variance_poisson(model.f, direct.g, pi);
    const double f_sup = mixbound::simd::max_abs(model.f);
    const double g_cap = (8.0 / 3.0) * static_cast<double>(*mix.tau) * f_sup;

    if (as_json) {
        nlohmann::json doc;
        doc["chain"] = spec.name;
        doc["states"] = spec.states;
        doc["tau"] = *mix.tau;
        doc["dobrushin"] = mix.deltas;
        doc["pi"] = std::vector<double>(pi.weights().begin(), pi.weights().end());
        doc["sigma2_series"] = sigma2_series;
        doc["sigma2_poisson"] = sigma2_poisson;
        doc["g_sup_norm"] = direct.sup_norm;
        doc["g_sup_norm_cap"] = g_cap;
        doc["poisson_residual"] = direct.residual;
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    std::cout << "chain: " << spec.name << " (" << spec.states << " states)\n";
    std::cout << "tau: " << *mix.tau << '\n';
    std::cout << "dobrushin:";
    for (double d : mix.deltas) std::cout << ' ' << fmt(d);
    std::cout << '\n';
    std::cout << "pi:";
    for (double w : pi.weights()) std::cout << ' ' << fmt(w);
    std::cout << '\n';
    std::cout << "sigma2 (series):  " << fmt(sigma2_series) << '\n';
    std::cout << "sigma2 (poisson): " << fmt(sigma2_poisson) << '\n';
    std::cout << "g sup-norm: " << fmt(direct.sup_norm) << "  (cap " << fmt(g_cap) << ")\n";
    std::cout << "poisson residual: " << fmt(direct.residual) << '\n';
    return 0;
}

int run_certify(const std::string& spec_path, mixbound::CertifyConfig config,
                const std::string& out_csv, const std::string& out_json) {
    const mixbound::ChainSpecFile spec = mixbound::load_chain_spec(spec_path);
    const mixbound::ChainModel model = mixbound::to_model(spec);
    const mixbound::CertifyResult result = mixbound::certify(model, config);
    const std::vector<mixbound::ReportRow> rows = mixbound::make_report_rows(spec.name, result);

    for (std::uint64_t n : config.n_list) {
        if (n < result.tau) {
            std::cerr << "note: n=" << n << " is below tau=" << result.tau
                      << "; the n^{1/4} correction term is outside its derivation range\n";
        }
    }

    const std::string csv = mixbound::report_to_csv(rows);
    if (out_csv.empty())
        std::cout << csv;
    else
        mixbound::write_file_atomic(out_csv, csv);
    if (!out_json.empty()) mixbound::write_file_atomic(out_json, mixbound::report_to_json(rows));

    std::size_t failures = 0;
    for (const auto& row : rows)
        if (!row.holds) ++failures;
    if (failures > 0) {
        std::cerr << "error: " << failures << " of " << rows.size()
                  << " verdicts violated their bound\n";
        return 1;
    }
    std::cerr << rows.size() << " verdicts, all hold (tau=" << result.tau
              << ", sigma=" << fmt(result.sigma) << ")\n";
    return 0;
}

int run_bound(double p, std::uint64_t n, std::uint64_t tau, double sigma,
              std::optional<double> delta) {
    using namespace mixbound::bounds;
    const BoundBreakdown pi_bound = rosenthal_bound(p, n, tau, sigma, true);
    const BoundBreakdown xi_bound = rosenthal_bound(p, n, tau, sigma, false);
    const BoundBreakdown aux = auxiliary_rosenthal_bound(p, n, tau);

    if (pi_bound.n_below_tau)
        std::cout << "note: n < tau; the n^{1/4} correction term is outside its derivation "
                     "range\n";
    std::cout << "rosenthal (stationary): total " << fmt(pi_bound.total) << '\n';
    for (const auto& [name, value] : pi_bound.terms)
        std::cout << "  " << name << ": " << fmt(value) << '\n';
    std::cout << "rosenthal (any start):  total " << fmt(xi_bound.total) << '\n';
    std::cout << "aux rosenthal: total " << fmt(aux.total) << '\n';
    std::cout << "crude second-moment root: " << fmt(crude_variance_bound(n, tau)) << '\n';
    std::cout << "poisson second-moment root: " << fmt(poisson_variance_bound(n, tau, sigma))
              << '\n';
    if (delta) {
        const BernsteinThreshold t = bernstein_threshold(*delta, n, tau, sigma);
        std::cout << "bernstein threshold at delta=" << fmt(*delta)
                  << ": conservative " << fmt(t.conservative) << ", literal " << fmt(t.literal)
                  << '\n';
    }
    return 0;
}

struct GenerateOptions {
    std::string family;
    double p = 0.3, q = 0.3;
    std::vector<double> weights;
    std::uint64_t size = 10;
    double epsilon = 0.5;
    double lambda = 0.5;
    std::string base;
    std::uint64_t seed = 0;
    std::string initial = "stationary";
    std::string out;
};

mixbound::ChainSpecFile build_family(const GenerateOptions& opt, const std::string& family) {
    if (family == "two_state") return mixbound::generate_two_state(opt.p, opt.q);
    if (family == "iid") {
        if (opt.weights.empty())
            throw mixbound::ValidationError("iid family needs --weights");
        return mixbound::generate_iid(opt.weights);
    }
    if (family == "random_doeblin")
        return mixbound::generate_random_doeblin(opt.size, opt.epsilon, opt.seed);
    if (family == "lazy") {
        if (opt.base.empty())
            throw mixbound::ValidationError("lazy family needs --base <family>");
        return mixbound::generate_lazy(build_family(opt, opt.base), opt.lambda);
    }
    throw mixbound::ValidationError("unknown family '" + family +
                                    "' (two_state, iid, random_doeblin, lazy)");
}

int run_generate(const GenerateOptions& opt) {
    if (opt.base == "lazy") throw mixbound::ValidationError("lazy cannot be its own base");
    mixbound::ChainSpecFile spec = build_family(opt, opt.family);
    if (opt.initial != "stationary") {
        char* end = nullptr;
        const unsigned long long z = std::strtoull(opt.initial.c_str(), &end, 10);
        if (end == opt.initial.c_str() || *end != '\0' || z >= spec.states)
            throw mixbound::ValidationError(
                "--initial must be 'stationary' or a state index below 'states'");
        std::vector<double> point(spec.states, 0.0);
        point[z] = 1.0;
        spec.initial = std::move(point);
    }
    // validate before emitting
    (void)mixbound::to_model(spec);
    const std::string text = mixbound::chain_spec_to_json(spec);
    if (opt.out.empty())
        std::cout << text;
    else
        mixbound::write_file_atomic(opt.out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-state Markov chain concentration toolkit"};
    app.require_subcommand(1);

    std::string spec_path;
    std::uint64_t horizon = mixbound::kDefaultMixingHorizon;
    bool analyze_json = false;
    CLI::App* analyze = app.add_subcommand("analyze", "mixing and variance diagnostics");
    analyze->add_option("spec", spec_path, "chain spec file")->required();
    analyze->add_option("--horizon", horizon, "contraction-search horizon");
    analyze->add_flag("--json", analyze_json, "emit JSON instead of text");

    mixbound::CertifyConfig config;
    std::string certify_spec, out_csv, out_json;
    bool seed_given = false;
    CLI::App* certify = app.add_subcommand("certify", "run the bound certification grid");
    certify->add_option("spec", certify_spec, "chain spec file")->required();
    certify->add_option("--p-list", config.p_list, "moment orders")->delimiter(',');
    certify->add_option("--n-list", config.n_list, "trajectory lengths")->delimiter(',');
    certify->add_option("--reps", config.replications, "replications per cell");
    certify->add_option("--seed", config.seed, "base RNG seed (overrides MIXBOUND_SEED)")
        ->each([&seed_given](const std::string&) { seed_given = true; });
    certify->add_option("--delta-list", config.delta_list, "deviation levels")->delimiter(',');
    certify->add_option("--threads", config.threads, "worker threads");
    certify->add_option("--out", out_csv, "CSV output path (default: stdout)");
    certify->add_option("--json", out_json, "also write a JSON mirror of the report");

    double bound_p = 2.0, bound_sigma = 0.0;
    std::uint64_t bound_n = 1, bound_tau = 1;
    double bound_delta_value = 0.0;
    bool bound_delta_given = false;
    CLI::App* bound = app.add_subcommand("bound", "evaluate closed-form bounds");
    bound->add_option("--p", bound_p, "moment order (>= 2)")->required();
    bound->add_option("--n", bound_n, "number of summands")->required();
    bound->add_option("--tau", bound_tau, "mixing time")->required();
    bound->add_option("--sigma", bound_sigma, "asymptotic standard deviation")->required();
    bound->add_option("--delta", bound_delta_value, "also print the deviation threshold")
        ->each([&bound_delta_given](const std::string&) { bound_delta_given = true; });

    GenerateOptions gen;
    bool gen_seed_given = false;
    CLI::App* generate = app.add_subcommand("generate", "emit a chain spec for a family");
    generate->add_option("--family", gen.family, "two_state | iid | random_doeblin | lazy")
        ->required();
    generate->add_option("--p", gen.p, "two_state flip probability 0 -> 1");
    generate->add_option("--q", gen.q, "two_state flip probability 1 -> 0");
    generate->add_option("--weights", gen.weights, "iid target distribution")->delimiter(',');
    generate->add_option("--size", gen.size, "random_doeblin state count");
    generate->add_option("--epsilon", gen.epsilon, "random_doeblin minorization mass");
    generate->add_option("--lambda", gen.lambda, "lazy self-loop weight");
    generate->add_option("--base", gen.base, "lazy base family");
    generate->add_option("--seed", gen.seed, "generator seed (overrides MIXBOUND_SEED)")
        ->each([&gen_seed_given](const std::string&) { gen_seed_given = true; });
    generate->add_option("--initial", gen.initial, "'stationary' or a start state index");
    generate->add_option("--out", gen.out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (analyze->parsed()) return run_analyze(spec_path, horizon, analyze_json);
        if (certify->parsed()) {
            if (!seed_given) config.seed = default_seed();
            return run_certify(certify_spec, config, out_csv, out_json);
        }
        if (bound->parsed())
            return run_bound(bound_p, bound_n, bound_tau, bound_sigma,
                             bound_delta_given ? std::optional<double>(bound_delta_value)
                                               : std::nullopt);
        if (generate->parsed()) {
            if (!gen_seed_given) gen.seed = default_seed();
            return run_generate(gen);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
