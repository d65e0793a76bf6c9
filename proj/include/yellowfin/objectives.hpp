#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace yellowfin {

using Rng = std::mt19937_64;

/// Stochastic first-order oracle with a known optimum. Implementations are
/// immutable; randomness comes from the caller's generator.
class StochasticObjective {
 public:
  virtual ~StochasticObjective() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> sample_gradient(std::span<const double> x, Rng& rng) const = 0;
  virtual std::vector<double> full_gradient(std::span<const double> x) const = 0;
  /// Absent for gradient-only oracles.
  virtual std::optional<double> loss(std::span<const double> x) const = 0;
  /// Every built-in objective has its optimum at the origin.
  virtual std::vector<double> optimum() const { return std::vector<double>(dimension(), 0.0); }
};

/// Diagonal quadratic averaged over n components,
///   f(x) = (1/n) sum_i sum_d (h_d / 2) (x_d - c_{i,d})^2,
/// with each dimension's offsets centered. One component index is sampled
/// per call and shared across dimensions.
class NoisyQuadraticObjective final : public StochasticObjective {
 public:
  /// offsets_per_dim is empty (noiseless) or has one list per dimension; all
  /// non-empty lists share a common length n, an empty list means zeros.
  NoisyQuadraticObjective(std::vector<double> curvatures,
                          std::vector<std::vector<double>> offsets_per_dim);

  std::size_t dimension() const override { return curvatures_.size(); }
  std::vector<double> sample_gradient(std::span<const double> x, Rng& rng) const override;
  std::vector<double> full_gradient(std::span<const double> x) const override;
  std::optional<double> loss(std::span<const double> x) const override;

  const std::vector<double>& curvatures() const { return curvatures_; }
  std::size_t component_count() const { return components_; }
  /// Offset of component i in dimension d.
  double offset(std::size_t component, std::size_t dim) const;
  /// Sum over dimensions of h_d^2 mean_i(c_{i,d}^2).
  double gradient_variance() const;

 private:
  std::vector<double> curvatures_;
  std::size_t components_ = 1;
  std::vector<double> offsets_;  // row-major [component][dim]
};

/// One-dimensional gradient field h(x) * x with h(x) = inner for
/// |x| <= breakpoint and outer beyond, plus optional Gaussian noise.
class PiecewiseCurvatureObjective final : public StochasticObjective {
 public:
  PiecewiseCurvatureObjective(double inner_curvature, double outer_curvature, double breakpoint,
                              double additive_noise_std = 0.0);

  std::size_t dimension() const override { return 1; }
  std::vector<double> sample_gradient(std::span<const double> x, Rng& rng) const override;
  std::vector<double> full_gradient(std::span<const double> x) const override;
  /// Continuous piecewise-quadratic potential whose derivative is h(x) x.
  std::optional<double> loss(std::span<const double> x) const override;

  double curvature_at(double x) const;
  /// max / min of the two curvatures.
  double condition_number() const;

  double inner_curvature() const { return inner_; }
  double outer_curvature() const { return outer_; }
  double breakpoint() const { return breakpoint_; }
  double additive_noise_std() const { return noise_std_; }

 private:
  double inner_;
  double outer_;
  double breakpoint_;
  double noise_std_;
};

NoisyQuadraticObjective make_noisy_quadratic(std::vector<double> curvatures,
                                             std::vector<std::vector<double>> offsets_per_dim);

PiecewiseCurvatureObjective make_two_curvature_toy(double inner, double outer, double breakpoint);

/// f'(x)_i / (x_i - x*_i); throws DomainError at the optimum coordinate.
double generalized_curvature(const StochasticObjective& objective, std::span<const double> x,
                             std::size_t coordinate = 0);

}  // namespace yellowfin
