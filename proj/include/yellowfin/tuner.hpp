#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "yellowfin/hyperparams.hpp"
#include "yellowfin/measurements.hpp"

namespace yellowfin {

struct SingleStepInputs {
  double variance = 0.0;  // C
  double distance = 1.0;  // D
  double h_max = 1.0;
  double h_min = 1.0;

  void validate() const;
};

struct TuneDecision {
  Hyperparams hyperparams;
  /// sqrt(mu_p), the unconstrained minimizer of the one-step surrogate.
  double cubic_root = 0.0;
  /// True when the condition-number bound, not mu_p, set the momentum.
  bool constrained = false;
  /// sqrt(h_max) when adaptive clipping is enabled.
  std::optional<double> clip_threshold;
  /// Estimator outputs the decision was computed from (tune() only).
  std::optional<MeasurementSnapshot> measurements;
};

/// Closed-form minimizer of mu * D^2 + lr^2 * C subject to
/// mu >= ((sqrt(h_max/h_min) - 1) / (sqrt(h_max/h_min) + 1))^2 and
/// lr = (1 - sqrt(mu))^2 / h_min.
TuneDecision single_step(const SingleStepInputs& in);

/// Root in [0, 1) of p'(x) = 0 for p(x) = x^2 D^2 + (1 - x)^4 C / h_min^2.
/// Solved as the depressed cubic y^3 + q y - q = 0 in y = 1 - x,
/// q = D^2 h_min^2 / (2 C), via Vieta's substitution; bisection takes over
/// when C / (h_min^2 D^2) is outside [1e-12, 1e12].
double single_step_root(double variance, double distance, double h_min);

/// The one-step surrogate p(x) evaluated at x = sqrt(mu).
double single_step_objective(double x, double variance, double distance, double h_min);

/// min(lr, step * lr / (10 * window_width)).
double slow_start(double learning_rate, std::size_t step, std::size_t window_width);

/// Rescales the gradient to norm sqrt(h_max) when it is longer than that.
std::vector<double> adaptive_clip(std::span<const double> gradient, double h_max);

/// One full tuner update on a gradient: measurements, SingleStep, slow start
/// (if enabled) and the learning-rate factor. The first update returns the
/// initial hyperparameters (lr 1e-4, momentum 0) while the estimators absorb
/// the gradient. Throws RejectedGradient without touching the state when the
/// gradient has zero norm or is non-finite.
TuneDecision tune(TunerState& state, std::span<const double> gradient, double lr_factor = 1.0);

}  // namespace yellowfin
