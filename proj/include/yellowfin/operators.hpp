#pragma once

// Momentum operators on a scalar quadratic slice with curvature h.
//
// The bias operator A advances the mean pair (x_{t+1}, x_t) and the variance
// operator B advances the second-moment triple (U_{t+1}, U_t, V_{t+1}).
// Both depend on (lr, momentum, h) only through m = 1 - lr*h + momentum and
// momentum itself, so their spectral radii are evaluated from the factored
// characteristic polynomials:
//   A: l^2 - m l + momentum
//   B: (l - momentum) * (l^2 + (2 momentum - m^2) l + momentum^2)

#include <array>
#include <span>

#include "yellowfin/hyperparams.hpp"

namespace yellowfin {

template <std::size_t N>
using SquareMatrix = std::array<std::array<double, N>, N>;

class BiasOperator {
 public:
  BiasOperator(const Hyperparams& hp, double curvature);

  const SquareMatrix<2>& entries() const { return entries_; }
  double momentum() const { return momentum_; }
  /// Top-left entry, 1 - lr*h + momentum.
  double trace_term() const { return entries_[0][0]; }
  /// lr*h, kept exactly as multiplied so edge tests are not perturbed by
  /// recovering it from the trace term.
  double step_gain() const { return step_gain_; }

 private:
  SquareMatrix<2> entries_{};
  double momentum_ = 0.0;
  double step_gain_ = 0.0;
};

class VarianceOperator {
 public:
  VarianceOperator(const Hyperparams& hp, double curvature);

  const SquareMatrix<3>& entries() const { return entries_; }
  double momentum() const { return momentum_; }
  /// 1 - lr*h + momentum, recovered from row 3.
  double trace_term() const { return entries_[2][0]; }
  double step_gain() const { return step_gain_; }

 private:
  SquareMatrix<3> entries_{};
  double momentum_ = 0.0;
  double step_gain_ = 0.0;
};

/// Range of (generalized) curvature the hyperparameters must cover.
struct CurvatureRange {
  double min = 1.0;
  double max = 1.0;

  /// Throws DomainError unless 0 < min <= max.
  void validate() const;
  /// Generalized condition number max/min.
  double condition_number() const { return max / min; }
};

struct RobustRegionQuery {
  Hyperparams hyperparams;
  CurvatureRange curvature;
};

struct SpectralRadii {
  double bias = 0.0;
  double variance = 0.0;
};

BiasOperator build_bias_operator(const Hyperparams& hp, double curvature);
VarianceOperator build_variance_operator(const Hyperparams& hp, double curvature);

double spectral_radius_bias(const BiasOperator& op);
double spectral_radius_variance(const VarianceOperator& op);

/// (1 - sqrt(mu))^2 <= lr * h_min and lr * h_max <= (1 + sqrt(mu))^2.
bool in_robust_region(const RobustRegionQuery& query);

/// Lower bound on momentum that lets a single learning rate keep every
/// curvature in [min, max] inside the robust region:
/// ((sqrt(nu) - 1) / (sqrt(nu) + 1))^2 with nu = max / min.
double momentum_lower_bound(const CurvatureRange& range);

/// Noiseless tuning rule: momentum at the lower bound, learning rate at the
/// lower end of the admissible interval, (1 - sqrt(mu))^2 / h_min.
Hyperparams noiseless_tune(double curvature_min, double curvature_max);

/// Largest per-direction radii over a diagonalizable Hessian spectrum. The
/// block operators decompose along eigendirections, so the maximum over the
/// scalar radii is the radius of the full operator.
SpectralRadii spectral_radius_multidim(std::span<const double> hessian_eigenvalues,
                                       const Hyperparams& hp);

}  // namespace yellowfin
