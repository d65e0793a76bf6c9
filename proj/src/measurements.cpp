#include "yellowfin/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yellowfin/errors.hpp"

namespace yellowfin {

void TunerConfig::validate() const {
  if (!(smoothing > 0.0 && smoothing < 1.0)) {
    throw DomainError("smoothing must lie in (0, 1), got " + std::to_string(smoothing));
  }
  if (window_width < 1) throw DomainError("window width must be at least 1");
  if (!(envelope_growth_cap > 1.0)) {
    throw DomainError("envelope growth cap must exceed 1, got " +
                      std::to_string(envelope_growth_cap));
  }
}

double zero_debias(double ema_value, double beta, std::size_t step) {
  if (step == 0) throw DomainError("zero_debias needs step >= 1");
  return ema_value / (1.0 - std::pow(beta, static_cast<double>(step)));
}

double clamped_envelope_update(double previous, double candidate, double beta, double cap) {
  return beta * previous + (1.0 - beta) * std::min(candidate, cap * previous);
}

void DebiasedAverage::update(double x) {
  ++count_;
  const double correction = 1.0 - std::pow(beta_, static_cast<double>(count_));
  value_ += (x - value_) * ((1.0 - beta_) / correction);
}

double DebiasedAverage::raw() const {
  if (count_ == 0) return 0.0;
  return value_ * (1.0 - std::pow(beta_, static_cast<double>(count_)));
}

TunerState::TunerState(TunerConfig config)
    : config_(config),
      h_max_avg_(config.smoothing),
      h_min_avg_(config.smoothing),
      grad_norm_avg_(config.smoothing),
      curvature_avg_(config.smoothing),
      distance_avg_(config.smoothing) {
  config_.validate();
}

CurvatureEstimate TunerState::curvature() const {
  if (!has_curvature()) throw DomainError("no curvature observed yet");
  if (config_.log_space_curvature) {
    const double hi = h_max_avg_.debiased();
    const double lo = h_min_avg_.debiased();
    return {hi == h_max_log_ ? h_max_last_ : std::exp(hi),
            lo == h_min_log_ ? h_min_last_ : std::exp(lo)};
  }
  return {h_max_avg_.debiased(), h_min_avg_.debiased()};
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s;
}

void require_usable_gradient(std::span<const double> gradient) {
  const double sq = squared_norm(gradient);
  if (!std::isfinite(sq)) throw RejectedGradient("gradient is not finite");
  if (!(sq > 0.0)) throw RejectedGradient("gradient has zero norm");
}

CurvatureEstimate observe_curvature(TunerState& state, std::span<const double> gradient) {
  require_usable_gradient(gradient);
  const TunerConfig& cfg = state.config_;
  const double h_t = squared_norm(gradient);

  state.curvature_window_.push_back(h_t);
  while (state.curvature_window_.size() > cfg.window_width) state.curvature_window_.pop_front();
  const auto [lo, hi] =
      std::minmax_element(state.curvature_window_.begin(), state.curvature_window_.end());

  double max_candidate = *hi;
  if (state.has_curvature()) {
    max_candidate = std::min(max_candidate, cfg.envelope_growth_cap * state.curvature().h_max);
  }
  // Keeps every smoothed h_max >= smoothed h_min even when the clamp bites.
  const double min_candidate = std::min(*lo, max_candidate);

  if (cfg.log_space_curvature) {
    state.h_max_log_ = std::log(max_candidate);
    state.h_max_last_ = max_candidate;
    state.h_min_log_ = std::log(min_candidate);
    state.h_min_last_ = min_candidate;
    state.h_max_avg_.update(state.h_max_log_);
    state.h_min_avg_.update(state.h_min_log_);
  } else {
    state.h_max_avg_.update(max_candidate);
    state.h_min_avg_.update(min_candidate);
  }
  return state.curvature();
}

double observe_variance(TunerState& state, std::span<const double> gradient) {
  if (state.grad_avg_.empty()) {
    state.grad_avg_.assign(gradient.size(), DebiasedAverage(state.config_.smoothing));
    state.grad_sq_avg_.assign(gradient.size(), DebiasedAverage(state.config_.smoothing));
  }
  if (gradient.size() != state.grad_avg_.size()) {
    throw DomainError("gradient dimension changed from " + std::to_string(state.grad_avg_.size()) +
                      " to " + std::to_string(gradient.size()));
  }
  double variance = 0.0;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    const double g = gradient[i];
    state.grad_avg_[i].update(g);
    state.grad_sq_avg_[i].update(g * g);
    const double mean = state.grad_avg_[i].debiased();
    variance += std::max(0.0, state.grad_sq_avg_[i].debiased() - mean * mean);
  }
  return variance;
}

double observe_distance(TunerState& state, std::span<const double> gradient) {
  require_usable_gradient(gradient);
  const double sq = squared_norm(gradient);
  state.grad_norm_avg_.update(std::sqrt(sq));
  state.curvature_avg_.update(sq);
  state.distance_avg_.update(state.grad_norm_avg_.debiased() / state.curvature_avg_.debiased());
  return state.distance_avg_.debiased();
}

MeasurementSnapshot observe(TunerState& state, std::span<const double> gradient) {
  require_usable_gradient(gradient);
  MeasurementSnapshot snap;
  const CurvatureEstimate curv = observe_curvature(state, gradient);
  snap.h_max = curv.h_max;
  snap.h_min = curv.h_min;
  snap.variance = observe_variance(state, gradient);
  snap.distance = observe_distance(state, gradient);
  return snap;
}

}  // namespace yellowfin
