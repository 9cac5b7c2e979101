#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixbound/linalg.hpp"

namespace mixbound {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonErgodicError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probability vector on {0, ..., size-1}. Inputs may deviate from unit mass
// by up to 1e-9; accepted vectors are renormalized so the stored weights sum
// to 1 at machine precision.
class Distribution {
  public:
    static Distribution validate(std::vector<double> weights);
    static Distribution point_mass(std::size_t state, std::size_t size);
    static Distribution uniform(std::size_t size);

    std::size_t size() const { return weights_.size(); }
    std::span<const double> weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }

  private:
    explicit Distribution(std::vector<double> w) : weights_(std::move(w)) {}
    std::vector<double> weights_;
};

// Row-stochastic transition matrix on a finite state space. Same acceptance
// and renormalization policy as Distribution, applied per row.
class StochasticKernel {
  public:
    static StochasticKernel validate(Matrix rows);

    std::size_t size() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }
    std::span<const double> row(std::size_t i) const { return matrix_.row(i); }

  private:
    explicit StochasticKernel(Matrix m) : matrix_(std::move(m)) {}
    Matrix matrix_;
};

inline StochasticKernel validate_kernel(Matrix rows) {
    return StochasticKernel::validate(std::move(rows));
}

// Kernel + test function + initial distribution (nullopt = stationary start).
struct ChainModel {
    StochasticKernel kernel;
    std::vector<double> f;
    std::optional<Distribution> initial;
};

ChainModel make_chain_model(StochasticKernel kernel, std::vector<double> f,
                            std::optional<Distribution> initial);

// Contraction coefficients Delta(Q^t) for t = 1..probed horizon, plus the
// certified threshold time tau: the smallest t with Delta(Q^t) <= 1/4. The
// scan stops at tau when found, so deltas has tau entries in that case.
struct MixingProfile {
    std::vector<double> deltas;
    std::optional<std::uint64_t> tau;
};

inline constexpr std::uint64_t kDefaultMixingHorizon = 10'000;
inline constexpr std::uint64_t kMaxKernelPower = 1'000'000;

Distribution stationary_distribution(const StochasticKernel& q);

double tv_distance(std::span<const double> mu, std::span<const double> nu);
double tv_distance(const Distribution& mu, const Distribution& nu);

// Half the largest L1 distance between two rows.
double dobrushin_of_matrix(const Matrix& qt);
double dobrushin_coefficient(const StochasticKernel& q, std::uint64_t t);

MixingProfile mixing_time(const StochasticKernel& q,
                          std::uint64_t horizon = kDefaultMixingHorizon);

// Q^t v by repeated matrix-vector products; t = 0 returns v.
std::vector<double> kernel_power_apply(const StochasticKernel& q, std::span<const double> v,
                                       std::uint64_t t);

// sum_z pi(z) v(z)
double expectation(const Distribution& pi, std::span<const double> v);

// v - pi(v)
std::vector<double> centered(std::span<const double> v, const Distribution& pi);

}  // namespace mixbound
