#pragma once

// Gradient-only estimators feeding the tuner: curvature range, gradient
// variance and distance to the optimum. Every running average is an
// exponential moving average with zero-debias.

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace yellowfin {

struct TunerConfig {
  double smoothing = 0.999;          // beta
  std::size_t window_width = 20;     // w, sliding window of curvature samples
  double envelope_growth_cap = 100;  // h_max candidate <= cap * current h_max
  bool clipping_enabled = false;
  bool slow_start_enabled = true;
  /// Smooth log(h_max,t) and log(h_min,t) instead of the raw extremes.
  bool log_space_curvature = true;

  void validate() const;
};

/// ema / (1 - beta^step). Throws DomainError when step == 0.
double zero_debias(double ema_value, double beta, std::size_t step);

/// beta * previous + (1 - beta) * min(candidate, cap * previous): the
/// growth-limited envelope update in linear space.
double clamped_envelope_update(double previous, double candidate, double beta, double cap);

/// Exponential moving average that keeps its zero-debiased value directly:
///   d_t = d_{t-1} + (x_t - d_{t-1}) * (1 - beta) / (1 - beta^t),
/// which equals raw_t / (1 - beta^t) for raw_t = beta raw_{t-1} + (1 - beta) x_t
/// and reproduces the first observation exactly.
class DebiasedAverage {
 public:
  explicit DebiasedAverage(double beta = 0.999) : beta_(beta) {}

  void update(double x);
  double debiased() const { return value_; }
  /// The un-debiased running average.
  double raw() const;
  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

 private:
  double beta_;
  double value_ = 0.0;
  std::size_t count_ = 0;
};

struct CurvatureEstimate {
  double h_max = 0.0;
  double h_min = 0.0;
};

struct MeasurementSnapshot {
  double h_max = 0.0;
  double h_min = 0.0;
  double variance = 0.0;
  double distance = 0.0;
};

/// Running estimator state. Single owner; driven sequentially.
class TunerState {
 public:
  explicit TunerState(TunerConfig config = {});

  const TunerConfig& config() const { return config_; }

  /// Number of completed tuner updates.
  std::size_t step() const { return step_; }
  void advance() { ++step_; }

  const std::deque<double>& curvature_window() const { return curvature_window_; }
  /// Smoothed extremes; log-space when config().log_space_curvature.
  const DebiasedAverage& h_max_average() const { return h_max_avg_; }
  const DebiasedAverage& h_min_average() const { return h_min_avg_; }
  const DebiasedAverage& grad_norm_average() const { return grad_norm_avg_; }
  const DebiasedAverage& curvature_average() const { return curvature_avg_; }
  const DebiasedAverage& distance_average() const { return distance_avg_; }
  const std::vector<DebiasedAverage>& grad_average() const { return grad_avg_; }
  const std::vector<DebiasedAverage>& grad_sq_average() const { return grad_sq_avg_; }

  /// Current debiased curvature extremes; requires at least one observation.
  CurvatureEstimate curvature() const;
  bool has_curvature() const { return !h_max_avg_.empty(); }

 private:
  friend CurvatureEstimate observe_curvature(TunerState&, std::span<const double>);
  friend double observe_variance(TunerState&, std::span<const double>);
  friend double observe_distance(TunerState&, std::span<const double>);

  TunerConfig config_;
  std::size_t step_ = 0;
  std::deque<double> curvature_window_;
  DebiasedAverage h_max_avg_;
  DebiasedAverage h_min_avg_;
  // Latest (log, linear) candidates. exp(log(h)) is not always h, so when the
  // smoothed log equals the latest log exactly the linear value is returned.
  double h_max_log_ = 0.0, h_max_last_ = 0.0;
  double h_min_log_ = 0.0, h_min_last_ = 0.0;
  std::vector<DebiasedAverage> grad_sq_avg_;
  std::vector<DebiasedAverage> grad_avg_;
  DebiasedAverage grad_norm_avg_;
  DebiasedAverage curvature_avg_;
  DebiasedAverage distance_avg_;
};

double squared_norm(std::span<const double> v);

/// Throws RejectedGradient for zero-norm or non-finite gradients.
void require_usable_gradient(std::span<const double> gradient);

/// Pushes h_t = |g|^2 into the window, clamps the windowed max against the
/// envelope growth cap (from the second observation on), smooths both
/// extremes and returns the debiased (h_max, h_min).
CurvatureEstimate observe_curvature(TunerState& state, std::span<const double> gradient);

/// sum_i max(0, debiased E[g_i^2] - debiased E[g_i]^2).
double observe_variance(TunerState& state, std::span<const double> gradient);

/// Debiased running average of |g|-bar / h-bar.
double observe_distance(TunerState& state, std::span<const double> gradient);

/// Runs all three estimators on one gradient.
MeasurementSnapshot observe(TunerState& state, std::span<const double> gradient);

}  // namespace yellowfin
