#pragma once

// Scalar noisy quadratic f(x) = (1/n) sum_i (h/2) (x - c_i)^2 with sum_i c_i = 0
// and its expected squared distance to the optimum x* = 0 under momentum SGD
// with single-component sampling and the initial condition x_1 = x_0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "yellowfin/hyperparams.hpp"

namespace yellowfin {

class NoisyQuadratic {
 public:
  /// Offsets are centered so that they sum to zero. An empty offset list is
  /// the noiseless quadratic (a single component at the optimum).
  NoisyQuadratic(double curvature, std::vector<double> offsets);

  /// Two symmetric components at +-sqrt(variance)/h, giving exactly the
  /// requested minibatch-gradient variance.
  static NoisyQuadratic with_gradient_variance(double curvature, double gradient_variance);

  double curvature() const { return curvature_; }
  const std::vector<double>& offsets() const { return offsets_; }
  std::size_t component_count() const { return offsets_.size(); }

  /// (1/2n) sum_i h c_i^2, the constant labelled "gradient variance" in the
  /// model's definition.
  double offset_constant() const;
  /// E(grad f_S - grad f)^2 = h^2 mean(c_i^2). This is the source term of the
  /// second-moment recurrence.
  double gradient_variance() const;

 private:
  double curvature_;
  std::vector<double> offsets_;
};

/// Mean pair (xbar_{t+1}, xbar_t) and centered second moments
/// (U_{t+1}, U_t, V_{t+1}) with U = Var(x), V = Cov(x_{t+1}, x_t).
struct MomentState {
  std::array<double, 2> mean_pair{};
  std::array<double, 3> second_moments{};
  std::size_t step = 0;

  /// x_1 = x_0 and no variance accumulated yet.
  static MomentState initial(double x0);
};

struct SquaredDistance {
  double total = 0.0;
  double bias = 0.0;
  double variance = 0.0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t runs = 0;
};

/// One step of the moment recurrences: the mean pair through the bias
/// operator A, the second moments through the variance operator B plus the
/// source (lr^2 * gradient_variance, 0, 0).
MomentState iterate_moments(const NoisyQuadratic& model, const Hyperparams& hp,
                            const MomentState& state);

/// E(x_{steps+1} - x*)^2 split into squared bias and variance, by iterating
/// the moment recurrences. steps == 0 returns (x0^2, x0^2, 0).
SquaredDistance exact_expected_sq_dist(const NoisyQuadratic& model, const Hyperparams& hp,
                                       double x0, std::size_t steps);

/// Same quantity for every t in 1..steps; element t-1 holds E(x_{t+1})^2.
std::vector<SquaredDistance> exact_expected_sq_dist_curve(const NoisyQuadratic& model,
                                                          const Hyperparams& hp, double x0,
                                                          std::size_t steps);

/// rho_bias^(2t) * x0_sq_dist + (1 - rho_var^t) * lr^2 * C / (1 - rho_var).
/// Both radii must be in [0, 1).
double surrogate_expected_sq_dist(double rho_bias, double rho_var, double learning_rate,
                                  double noise, double x0_sq_dist, std::size_t steps);

/// Average of (x_{steps+1})^2 over independent simulated trajectories, one
/// uniformly sampled component per step. Deterministic for a given seed.
MonteCarloEstimate monte_carlo_sq_dist(const NoisyQuadratic& model, const Hyperparams& hp,
                                       double x0, std::size_t steps, std::size_t runs,
                                       std::uint64_t seed);

/// Monte Carlo estimates for every t in 1..steps from one set of trajectories;
/// element t-1 estimates E(x_{t+1})^2.
std::vector<MonteCarloEstimate> monte_carlo_sq_dist_curve(const NoisyQuadratic& model,
                                                          const Hyperparams& hp, double x0,
                                                          std::size_t steps, std::size_t runs,
                                                          std::uint64_t seed);

}  // namespace yellowfin
