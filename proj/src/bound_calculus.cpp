#include "mixbound/bound_calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mixbound::bounds {

namespace {

double finish(BoundBreakdown& breakdown) {
    double total = 0.0;
    for (const auto& [name, value] : breakdown.terms) total += value;
    breakdown.total = total;
    return total;
}

double log2_2p(double p) { return std::log2(2.0 * p); }

}  // namespace

const ConstantTable& constants() {
    static const ConstantTable table = [] {
        ConstantTable t{};
        t.c_rm1 = 60.0 * std::numbers::e;
        t.c_rm2 = 60.0;
        t.d_aux1 = (16.0 / 3.0) * t.c_rm1;
        t.d_aux2 = 8.0 * t.c_rm2;
        t.d_rec1 = std::sqrt(19.0 / 3.0) * std::sqrt(t.c_rm1);
        t.d_rec2 = 3.0 * std::sqrt(t.c_rm2);
        t.d_thm1 = (16.0 / 3.0) * std::sqrt(19.0 / 3.0) * t.c_rm1;
        t.d_thm2 = (64.0 / 3.0) * (std::sqrt(t.c_rm2) * t.c_rm1 * t.c_rm1 + t.c_rm2);
        return t;
    }();
    return table;
}

BoundBreakdown rosenthal_bound(double p, std::uint64_t n, std::uint64_t tau, double sigma,
                               bool from_stationary) {
    if (p < 2.0) throw std::invalid_argument("rosenthal_bound: p must be >= 2");
    if (n == 0 || tau == 0) throw std::invalid_argument("rosenthal_bound: n, tau must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("rosenthal_bound: sigma must be >= 0");
    const ConstantTable& c = constants();
    const double dn = static_cast<double>(n);
    const double dtau = static_cast<double>(tau);
    const double plog = p * log2_2p(p);

    BoundBreakdown out;
    out.inputs = {p, n, tau, sigma, from_stationary};
    out.n_below_tau = n < tau;
    out.terms.emplace_back("variance", c.c_rm1 * std::numbers::sqrt2 * std::sqrt(p) *
                                           std::sqrt(dn) * sigma);
    out.terms.emplace_back("quarter",
                           c.d_thm1 * std::pow(dn, 0.25) * std::pow(dtau, 0.75) * plog);
    out.terms.emplace_back("tau", c.d_thm2 * dtau * plog);
    if (!from_stationary) out.terms.emplace_back("ksi_correction", 2.0 * c.d_thm2 * dtau * plog);
    finish(out);
    return out;
}

BoundBreakdown rosenthal_bound_dyadic(std::uint32_t s, std::uint64_t n, std::uint64_t tau,
                                      double sigma) {
    if (s < 1) throw std::invalid_argument("rosenthal_bound_dyadic: s must be >= 1");
    if (n == 0 || tau == 0)
        throw std::invalid_argument("rosenthal_bound_dyadic: n, tau must be >= 1");
    const ConstantTable& c = constants();
    const double p = std::exp2(static_cast<double>(s));
    const double dn = static_cast<double>(n);
    const double dtau = static_cast<double>(tau);
    const double plog = p * std::log2(p);

    BoundBreakdown out;
    out.inputs = {p, n, tau, sigma, true};
    out.n_below_tau = n < tau;
    out.terms.emplace_back("variance", c.c_rm1 * std::sqrt(p) * std::sqrt(dn) * sigma);
    out.terms.emplace_back("quarter",
                           0.5 * c.d_thm1 * std::pow(dn, 0.25) * std::pow(dtau, 0.75) * plog);
    out.terms.emplace_back("tau", 0.5 * c.d_thm2 * dtau * plog);
    finish(out);
    return out;
}

BoundBreakdown auxiliary_rosenthal_bound(double p, std::uint64_t n, std::uint64_t tau) {
    if (p < 2.0) throw std::invalid_argument("auxiliary_rosenthal_bound: p must be >= 2");
    if (n == 0 || tau == 0)
        throw std::invalid_argument("auxiliary_rosenthal_bound: n, tau must be >= 1");
    const ConstantTable& c = constants();
    const double dn = static_cast<double>(n);
    const double dtau = static_cast<double>(tau);

    BoundBreakdown out;
    out.inputs = {p, n, tau, 0.0, true};
    out.n_below_tau = n < tau;
    out.terms.emplace_back("sqrt", c.d_aux1 * std::sqrt(dn) * std::sqrt(dtau) * std::sqrt(p));
    out.terms.emplace_back("linear", c.d_aux2 * dtau * p);
    finish(out);
    return out;
}

double crude_variance_bound(std::uint64_t n, std::uint64_t tau) {
    if (n == 0 || tau == 0) throw std::invalid_argument("crude_variance_bound: n, tau >= 1");
    return (1.0 + 4.0 / std::sqrt(3.0)) *
           std::sqrt(static_cast<double>(n) * static_cast<double>(tau));
}

double poisson_variance_bound(std::uint64_t n, std::uint64_t tau, double sigma) {
    if (n == 0 || tau == 0) throw std::invalid_argument("poisson_variance_bound: n, tau >= 1");
    if (sigma < 0.0) throw std::invalid_argument("poisson_variance_bound: sigma must be >= 0");
    return std::sqrt(static_cast<double>(n)) * sigma +
           (16.0 / 3.0) * static_cast<double>(tau);
}

BernsteinThreshold bernstein_threshold(double delta, std::uint64_t n, std::uint64_t tau,
                                       double sigma) {
    if (!(delta > 0.0) || delta > kMaxBernsteinDelta)
        throw std::invalid_argument("bernstein_threshold: delta must lie in (0, e^-2]");
    const ConstantTable& c = constants();
    const double p = std::log(1.0 / delta);  // >= 2 on the admissible range
    const double dn = static_cast<double>(n);
    const double dtau = static_cast<double>(tau);
    const double lntilde = p * log2_2p(p);

    BernsteinThreshold out{};
    out.literal = c.c_rm1 * std::numbers::sqrt2 * std::sqrt(dn * p) * sigma +
                  c.d_thm1 * std::pow(dn, 0.25) * std::pow(dtau, 0.75) * lntilde +
                  c.d_thm2 * dtau * lntilde;
    out.conservative = std::numbers::e * rosenthal_bound(p, n, tau, sigma, true).total;
    return out;
}

double deviation_from_moments(const std::function<double(double)>& phi, double delta) {
    if (!(delta > 0.0) || delta > kMaxBernsteinDelta)
        throw std::invalid_argument("deviation_from_moments: delta must lie in (0, e^-2]");
    return std::numbers::e * phi(std::log(1.0 / delta));
}

double coupling_moment_bound(double p, std::uint64_t tau) {
    if (p < 1.0) throw std::invalid_argument("coupling_moment_bound: p must be >= 1");
    if (tau == 0) throw std::invalid_argument("coupling_moment_bound: tau must be >= 1");
    const double log_term =
        p * std::log(static_cast<double>(tau) / std::log(4.0)) + std::lgamma(p + 1.0);
    if (log_term > 700.0) return std::numeric_limits<double>::infinity();
    return 1.0 + 128.0 * std::exp(log_term);
}

double recursion_closed_form(std::span<const double> a, std::span<const double> b,
                             std::span<const double> c, double r_m) {
    if (a.size() != b.size() || a.size() != c.size())
        throw std::invalid_argument("recursion_closed_form: sequences differ in length");
    if (r_m < 0.0) throw std::invalid_argument("recursion_closed_form: negative r_m");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < 0.0 || b[i] < 0.0 || c[i] < 0.0)
            throw std::invalid_argument("recursion_closed_form: negative coefficient");

    const std::size_t steps = a.size();  // m - 1
    double prefix = 1.0;                 // prod_{i<l} a_i^{1/2^{i-1}}
    double exponent = 1.0;               // 1/2^{l-1}
    double correction = 0.0;
    for (std::size_t l = 0; l < steps; ++l) {
        correction += prefix * (std::pow(b[l], exponent) + std::pow(c[l], exponent));
        prefix *= std::pow(a[l], exponent);
        exponent *= 0.5;
    }
    return prefix * std::pow(r_m, exponent) + correction;
}

double recursion_corollary_bound(double alpha, double beta, double gamma, double kappa0,
                                 double kappa1, std::uint32_t s, double r_last) {
    if (alpha < 1.0 || beta < 1.0 || gamma < 1.0 || kappa0 < 1.0 || kappa1 < 1.0)
        throw std::invalid_argument("recursion_corollary_bound: parameters must be >= 1");
    if (s < 2) throw std::invalid_argument("recursion_corollary_bound: s must be >= 2");
    if (r_last < 0.0) throw std::invalid_argument("recursion_corollary_bound: negative r_last");
    const double half_pow = std::exp2(static_cast<double>(s) / 2.0);
    const double root = std::pow(r_last, std::exp2(-(static_cast<double>(s) - 2.0)));
    return alpha * half_pow * root +
           alpha * (beta * kappa0 + gamma * kappa1) * half_pow * (static_cast<double>(s) - 2.0);
}

double moment_recursion_rhs(std::uint32_t k, std::uint32_t s, std::uint64_t n,
                            std::uint64_t tau, double r_next) {
    if (k < 1 || k + 1 > s) throw std::invalid_argument("moment_recursion_rhs: need 1 <= k < s");
    if (r_next < 0.0) throw std::invalid_argument("moment_recursion_rhs: negative r_next");
    const ConstantTable& c = constants();
    const double dn = static_cast<double>(n);
    const double dtau = static_cast<double>(tau);
    const double block = std::pow((8.0 / 3.0) * dtau, std::exp2(static_cast<double>(k) - 1.0));
    const double martingale =
        std::sqrt(c.c_rm1) * std::exp2((static_cast<double>(s) - k) / 4.0) * std::sqrt(r_next);
    const double quarter = std::pow(16.0 / 3.0, -0.5) * std::pow(dtau, -0.25) * c.d_rec1 *
                           std::pow(dn, 0.25) * block *
                           std::exp2((static_cast<double>(s) + k) / 4.0);
    const double tail = c.d_rec2 * std::exp2(static_cast<double>(s) / 2.0) * block;
    return martingale + quarter + tail;
}

}  // namespace mixbound::bounds
