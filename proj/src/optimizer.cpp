#include "yellowfin/optimizer.hpp"

#include <cmath>
#include <string>

#include "yellowfin/errors.hpp"
#include "yellowfin/tuner.hpp"

namespace yellowfin {

OptimizerState OptimizerState::initial(std::span<const double> x0) {
  OptimizerState s;
  s.current.assign(x0.begin(), x0.end());
  s.previous = s.current;
  s.step = 0;
  return s;
}

OptimizerState momentum_step(const OptimizerState& state, std::span<const double> gradient,
                             const Hyperparams& hp) {
  if (gradient.size() != state.current.size() || state.previous.size() != state.current.size()) {
    throw DomainError("gradient dimension " + std::to_string(gradient.size()) +
                      " does not match iterate dimension " + std::to_string(state.current.size()));
  }
  OptimizerState next;
  next.current.resize(state.current.size());
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i])) {
      throw DivergenceError("non-finite gradient at step " + std::to_string(state.step + 1));
    }
    const double x = state.current[i];
    next.current[i] = x - hp.learning_rate * gradient[i] + hp.momentum * (x - state.previous[i]);
  }
  next.previous = state.current;
  next.step = state.step + 1;
  return next;
}

double sq_dist_to_optimum(const StochasticObjective& objective, std::span<const double> x) {
  const std::vector<double> opt = objective.optimum();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - opt[i];
    s += d * d;
  }
  return s;
}

TunerDriver::TunerDriver(const YellowFinMode& mode)
    : state_(mode.config), lr_factor_(mode.lr_factor) {
  if (!(lr_factor_ > 0.0) || !std::isfinite(lr_factor_)) {
    throw DomainError("learning-rate factor must be positive");
  }
}

TunedGradient TunerDriver::process(std::vector<double> gradient) {
  TunedGradient out;
  if (state_.config().clipping_enabled && state_.has_curvature()) {
    const double h_max = state_.curvature().h_max;
    if (squared_norm(gradient) > h_max) {
      gradient = adaptive_clip(gradient, h_max);
      out.clipped = true;
    }
  }
  try {
    const TuneDecision decision = tune(state_, gradient, lr_factor_);
    hyperparams_ = decision.hyperparams;
    last_measurements_ = decision.measurements;
  } catch (const RejectedGradient&) {
    // Estimators are undefined on this gradient; reuse the last decision.
  }
  out.gradient = std::move(gradient);
  out.hyperparams = hyperparams_;
  out.measurements = last_measurements_;
  return out;
}

namespace {

void fill_measurements(TraceRow& row, const std::optional<MeasurementSnapshot>& m) {
  if (!m) return;
  row.h_min = m->h_min;
  row.h_max = m->h_max;
  row.var_C = m->variance;
  row.dist_D = m->distance;
}

}  // namespace

std::vector<TraceRow> run_experiment(const StochasticObjective& objective,
                                     const OptimizerMode& mode, std::span<const double> x0,
                                     std::size_t steps, std::uint64_t seed) {
  if (steps == 0) throw DomainError("run_experiment needs at least one step");
  if (x0.size() != objective.dimension()) {
    throw DomainError("initial point has dimension " + std::to_string(x0.size()) +
                      ", objective has " + std::to_string(objective.dimension()));
  }
  if (const auto* fixed = std::get_if<FixedMode>(&mode)) fixed->hyperparams.validate();
  if (const auto* sched = std::get_if<ScheduleMode>(&mode)) {
    if (sched->schedule.empty()) throw DomainError("schedule mode needs at least one entry");
    for (const auto& hp : sched->schedule) hp.validate();
  }

  Rng rng(seed);
  OptimizerState state = OptimizerState::initial(x0);
  std::optional<TunerDriver> driver;
  if (const auto* yf = std::get_if<YellowFinMode>(&mode)) driver.emplace(*yf);

  std::vector<TraceRow> trace;
  trace.reserve(steps);
  for (std::size_t t = 1; t <= steps; ++t) {
    std::vector<double> gradient = objective.sample_gradient(state.current, rng);
    TraceRow row;
    row.step = t;
    Hyperparams hp;
    if (const auto* fixed = std::get_if<FixedMode>(&mode)) {
      hp = fixed->hyperparams;
    } else if (const auto* sched = std::get_if<ScheduleMode>(&mode)) {
      hp = sched->schedule[std::min(t - 1, sched->schedule.size() - 1)];
    } else {
      TunedGradient tuned = driver->process(std::move(gradient));
      gradient = std::move(tuned.gradient);
      hp = tuned.hyperparams;
      row.clipped = tuned.clipped;
      fill_measurements(row, tuned.measurements);
    }
    state = momentum_step(state, gradient, hp);
    row.mu = hp.momentum;
    row.lr = hp.learning_rate;
    row.sq_dist = sq_dist_to_optimum(objective, state.current);
    row.loss = objective.loss(state.current);
    trace.push_back(row);
  }
  return trace;
}

}  // namespace yellowfin
