#include "yellowfin/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yellowfin/errors.hpp"
#include "yellowfin/operators.hpp"

namespace yellowfin {

namespace {

// Residual of the stationarity condition p'(x) / 2 scaled by 1 / C:
// (1 - x)^3 - q x with q = D^2 h_min^2 / (2 C). Decreasing on [0, 1].
double stationarity_residual(double x, double q) {
  const double y = 1.0 - x;
  return y * y * y - q * x;
}

double bisect_root(double q) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (stationarity_residual(mid, q) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void SingleStepInputs::validate() const {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw DomainError("SingleStep variance must be finite and >= 0");
  }
  if (!(distance > 0.0) || !std::isfinite(distance)) {
    throw DomainError("SingleStep distance must be finite and > 0");
  }
  CurvatureRange{h_min, h_max}.validate();
}

double single_step_objective(double x, double variance, double distance, double h_min) {
  const double y = 1.0 - x;
  const double y2 = y * y;
  return x * x * distance * distance + y2 * y2 * variance / (h_min * h_min);
}

double single_step_root(double variance, double distance, double h_min) {
  if (variance == 0.0) return 0.0;
  const double d2h2 = distance * distance * h_min * h_min;
  const double ratio = variance / d2h2;
  const double q = d2h2 / (2.0 * variance);
  if (!(ratio >= 1e-12 && ratio <= 1e12)) {
    return bisect_root(q);
  }
  // y^3 + q y - q = 0. With y = w - q / (3 w):
  // w^3 = q / 2 + sqrt(q^2 / 4 + q^3 / 27), the real branch since q > 0.
  const double w3 = 0.5 * q + std::sqrt(0.25 * q * q + q * q * q / 27.0);
  const double w = std::cbrt(w3);
  const double y = w - q / (3.0 * w);
  double x = 1.0 - y;
  // One Newton step on the residual recovers digits lost to cancellation in
  // w - q / (3 w) when q is large.
  const double slope = -3.0 * (1.0 - x) * (1.0 - x) - q;
  x -= stationarity_residual(x, q) / slope;
  if (!(x >= 0.0 && x < 1.0)) return bisect_root(q);
  return x;
}

TuneDecision single_step(const SingleStepInputs& in) {
  in.validate();
  TuneDecision out;
  out.cubic_root = single_step_root(in.variance, in.distance, in.h_min);
  const double mu_p = out.cubic_root * out.cubic_root;
  const double mu_bound = momentum_lower_bound(CurvatureRange{in.h_min, in.h_max});
  out.constrained = mu_bound > mu_p;
  const double mu = std::max(mu_p, mu_bound);
  const double gap = 1.0 - std::sqrt(mu);
  out.hyperparams = Hyperparams{gap * gap / in.h_min, mu};
  return out;
}

double slow_start(double learning_rate, std::size_t step, std::size_t window_width) {
  const double ramp =
      static_cast<double>(step) * learning_rate / (10.0 * static_cast<double>(window_width));
  return std::min(learning_rate, ramp);
}

std::vector<double> adaptive_clip(std::span<const double> gradient, double h_max) {
  if (!(h_max > 0.0)) throw DomainError("adaptive_clip needs h_max > 0");
  std::vector<double> out(gradient.begin(), gradient.end());
  const double norm = std::sqrt(squared_norm(gradient));
  const double threshold = std::sqrt(h_max);
  if (norm > threshold) {
    // Rounding can leave the rescaled norm an ulp above the threshold; shrink
    // the scale until it is not, so clipping twice changes nothing.
    double scale = threshold / norm;
    for (int i = 0; i < 64; ++i) {
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = gradient[k] * scale;
      if (std::sqrt(squared_norm(out)) <= threshold) break;
      scale = std::nextafter(scale, 0.0);
    }
  }
  return out;
}

TuneDecision tune(TunerState& state, std::span<const double> gradient, double lr_factor) {
  if (!(lr_factor > 0.0) || !std::isfinite(lr_factor)) {
    throw DomainError("learning-rate factor must be positive, got " + std::to_string(lr_factor));
  }
  require_usable_gradient(gradient);
  const MeasurementSnapshot snap = observe(state, gradient);
  state.advance();

  TuneDecision decision = single_step({snap.variance, snap.distance, snap.h_max, snap.h_min});
  const TunerConfig& cfg = state.config();
  if (state.step() == 1) {
    decision.hyperparams = kInitialHyperparams;
  } else {
    double lr = decision.hyperparams.learning_rate;
    if (cfg.slow_start_enabled) lr = slow_start(lr, state.step(), cfg.window_width);
    decision.hyperparams.learning_rate = lr * lr_factor;
  }
  if (cfg.clipping_enabled) decision.clip_threshold = std::sqrt(snap.h_max);
  decision.measurements = snap;
  return decision;
}

}  // namespace yellowfin
