#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mixbound::bounds {

// Frozen constants of the moment inequalities. c_rm1/c_rm2 come from the
// martingale Rosenthal inequality; the d_* constants are the derived
// combinations used by the composite bounds. Exposed read-only so reports
// always refer to the same reference values.
struct ConstantTable {
    double c_rm1;    // 60 e
    double c_rm2;    // 60
    double d_aux1;   // (16/3) c_rm1
    double d_aux2;   // 8 c_rm2
    double d_rec1;   // sqrt(19/3) sqrt(c_rm1)
    double d_rec2;   // 3 sqrt(c_rm2)
    double d_thm1;   // (16/3) sqrt(19/3) c_rm1
    double d_thm2;   // (64/3) (sqrt(c_rm2) c_rm1^2 + c_rm2)
};

const ConstantTable& constants();

struct BoundInputs {
    double p = 0.0;
    std::uint64_t n = 0;
    std::uint64_t tau = 0;
    double sigma = 0.0;
    bool from_stationary = true;
};

// A bound value decomposed into its named additive terms.
struct BoundBreakdown {
    double total = 0.0;
    std::vector<std::pair<std::string, double>> terms;
    BoundInputs inputs;
    // The proof of the n^{1/4} term needs n >= tau; the bound is still
    // evaluated below that but reports flag it.
    bool n_below_tau = false;
};

// Moment bound for E^{1/p}|S_n|^p: variance term + n^{1/4} tau^{3/4} term +
// tau term; non-stationary starts add one extra tau-scale term.
BoundBreakdown rosenthal_bound(double p, std::uint64_t n, std::uint64_t tau, double sigma,
                               bool from_stationary);

// Dyadic-moment variant at p = 2^s with halved correction constants and
// log2(p) in place of log2(2p); the general bound dominates it term by term.
BoundBreakdown rosenthal_bound_dyadic(std::uint32_t s, std::uint64_t n, std::uint64_t tau,
                                      double sigma);

// Variance-free moment bound: d_aux1 sqrt(n tau p) + d_aux2 tau p.
BoundBreakdown auxiliary_rosenthal_bound(double p, std::uint64_t n, std::uint64_t tau);

// (1 + 4/sqrt(3)) sqrt(n tau), a second-moment root bound.
double crude_variance_bound(std::uint64_t n, std::uint64_t tau);

// sqrt(n) sigma + (16/3) tau, the Poisson-route second-moment root bound.
double poisson_variance_bound(std::uint64_t n, std::uint64_t tau, double sigma);

// Deviation threshold with failure probability delta. `literal` evaluates the
// closed-form display; `conservative` is e times the moment bound at
// p = ln(1/delta) and is the variant certification uses by default.
struct BernsteinThreshold {
    double literal;
    double conservative;
};
BernsteinThreshold bernstein_threshold(double delta, std::uint64_t n, std::uint64_t tau,
                                       double sigma);

inline constexpr double kMaxBernsteinDelta = 0.13533528323661270231781372785917;  // e^{-2}

// e phi(ln(1/delta)): converts a p-moment envelope phi into a deviation
// threshold at level delta.
double deviation_from_moments(const std::function<double(double)>& phi, double delta);

// 1 + 128 (tau/ln 4)^p Gamma(p+1); +infinity when the exponent overflows.
double coupling_moment_bound(double p, std::uint64_t tau);

// Closed form for the square-root recursion r_k <= a_k sqrt(r_{k+1}) + b_k + c_k.
double recursion_closed_form(std::span<const double> a, std::span<const double> b,
                             std::span<const double> c, double r_m);

// alpha 2^{s/2} r_last^{1/2^{s-2}} + alpha (beta kappa0 + gamma kappa1) 2^{s/2} (s-2).
double recursion_corollary_bound(double alpha, double beta, double gamma, double kappa0,
                                 double kappa1, std::uint32_t s, double r_last);

// One step of the moment recursion: the bound on R_{k,s} given R_{k+1,s}.
double moment_recursion_rhs(std::uint32_t k, std::uint32_t s, std::uint64_t n,
                            std::uint64_t tau, double r_next);

}  // namespace mixbound::bounds
