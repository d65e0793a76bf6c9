#include "yellowfin/async_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "yellowfin/errors.hpp"

namespace yellowfin {

std::size_t AsyncConfig::effective_staleness() const {
  return staleness.value_or(workers - 1);
}

void AsyncConfig::validate() const {
  if (workers < 1) throw DomainError("async simulation needs at least one worker");
  if (!(feedback_gain > 0.0) || !std::isfinite(feedback_gain)) {
    throw DomainError("feedback gain must be positive, got " + std::to_string(feedback_gain));
  }
  if (measurement_window < 1) throw DomainError("measurement window must be at least 1");
}

AsyncState::AsyncState(std::span<const double> x0, std::size_t staleness)
    : staleness_(staleness) {
  if (x0.empty()) throw DomainError("initial point must be non-empty");
  const std::vector<double> start(x0.begin(), x0.end());
  for (std::size_t i = 0; i < staleness_ + 2; ++i) {
    history_.push_back(start);
    history_steps_.push_back(0);
  }
}

const std::vector<double>& AsyncState::iterate(std::size_t lag) const {
  if (lag >= history_.size()) {
    throw DomainError("iterate lag " + std::to_string(lag) + " exceeds history depth " +
                      std::to_string(history_.size()));
  }
  return history_[history_.size() - 1 - lag];
}

std::size_t AsyncState::iterate_step(std::size_t lag) const {
  if (lag >= history_steps_.size()) throw DomainError("iterate lag exceeds history depth");
  return history_steps_[history_steps_.size() - 1 - lag];
}

std::optional<double> AsyncState::mu_hat_running_mean(std::size_t window) const {
  if (mu_hat_history_.empty() || window == 0) return std::nullopt;
  const std::size_t n = std::min(window, mu_hat_history_.size());
  const double sum = std::accumulate(mu_hat_history_.end() - static_cast<std::ptrdiff_t>(n),
                                     mu_hat_history_.end(), 0.0);
  return sum / static_cast<double>(n);
}

void AsyncState::apply(std::span<const double> gradient, const Hyperparams& hp) {
  const std::vector<double>& cur = iterate(0);
  const std::vector<double>& prev = iterate(1);
  if (gradient.size() != cur.size()) {
    throw DomainError("gradient dimension does not match the model");
  }
  std::vector<double> next(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) {
    if (!std::isfinite(gradient[i])) {
      throw DivergenceError("non-finite gradient at async step " + std::to_string(step_ + 1));
    }
    next[i] = cur[i] - hp.learning_rate * gradient[i] + hp.momentum * (cur[i] - prev[i]);
  }
  last_gradient_.assign(gradient.begin(), gradient.end());
  last_gradient_source_ = iterate_step(staleness_);
  ++step_;
  history_.push_back(std::move(next));
  history_steps_.push_back(step_);
  while (history_.size() > staleness_ + 3) {
    history_.pop_front();
    history_steps_.pop_front();
  }
}

void async_step(AsyncState& state, const StochasticObjective& objective, const Hyperparams& hp,
                Rng& rng) {
  const std::vector<double> gradient = objective.sample_gradient(state.stale_model(), rng);
  state.apply(gradient, hp);
}

std::optional<double> measure_total_momentum(const AsyncState& state, double learning_rate) {
  const std::size_t tau = state.staleness();
  if (state.history_depth() < tau + 3 || state.step() == 0) {
    throw DomainError("total-momentum measurement needs " + std::to_string(tau + 3) +
                      " iterates of history");
  }
  const std::vector<double>& newer = state.iterate(tau);      // x_{t-tau}
  const std::vector<double>& mid = state.iterate(tau + 1);    // x_{t-tau-1}
  const std::vector<double>& older = state.iterate(tau + 2);  // x_{t-tau-2}
  const std::vector<double>& g = state.last_gradient();

  std::vector<double> ratios;
  ratios.reserve(mid.size());
  for (std::size_t i = 0; i < mid.size(); ++i) {
    const double denom = mid[i] - older[i];
    if (!(std::abs(denom) >= 1e-12 * (1.0 + std::abs(mid[i])))) continue;
    ratios.push_back((newer[i] - mid[i] + learning_rate * g[i]) / denom);
  }
  if (ratios.empty()) return std::nullopt;
  const std::size_t half = ratios.size() / 2;
  std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(half),
                   ratios.end());
  const double upper = ratios[half];
  if (ratios.size() % 2 == 1) return upper;
  const double lower = *std::max_element(ratios.begin(),
                                         ratios.begin() + static_cast<std::ptrdiff_t>(half));
  return 0.5 * (lower + upper);
}

double closed_loop_update(double mu, double mu_target, double mu_hat, double gamma) {
  return std::clamp(mu + gamma * (mu_target - mu_hat), 0.0, kMaxMomentum);
}

std::vector<TraceRow> run_async_experiment(const StochasticObjective& objective,
                                           const AsyncTunerMode& mode, const AsyncConfig& cfg,
                                           std::span<const double> x0, std::size_t steps,
                                           std::uint64_t seed) {
  cfg.validate();
  const std::size_t tau = cfg.effective_staleness();
  if (steps < tau + 3) {
    throw DomainError("async run needs at least staleness + 3 = " + std::to_string(tau + 3) +
                      " steps");
  }
  if (x0.size() != objective.dimension()) {
    throw DomainError("initial point dimension does not match the objective");
  }
  if (const auto* fixed = std::get_if<FixedTarget>(&mode)) fixed->target.validate();

  Rng rng(seed);
  AsyncState state(x0, tau);
  std::optional<TunerDriver> driver;
  if (const auto* yf = std::get_if<YellowFinMode>(&mode)) driver.emplace(*yf);

  std::vector<TraceRow> trace;
  trace.reserve(steps);
  for (std::size_t t = 1; t <= steps; ++t) {
    std::vector<double> gradient = objective.sample_gradient(state.stale_model(), rng);
    TraceRow row;
    row.step = t;

    Hyperparams target;
    if (const auto* fixed = std::get_if<FixedTarget>(&mode)) {
      target = fixed->target;
    } else {
      TunedGradient tuned = driver->process(std::move(gradient));
      gradient = std::move(tuned.gradient);
      target = tuned.hyperparams;
      row.clipped = tuned.clipped;
      if (tuned.measurements) {
        row.h_min = tuned.measurements->h_min;
        row.h_max = tuned.measurements->h_max;
        row.var_C = tuned.measurements->variance;
        row.dist_D = tuned.measurements->distance;
      }
    }
    if (!cfg.closed_loop) state.set_algorithmic_momentum(target.momentum);

    const Hyperparams applied{target.learning_rate, state.algorithmic_momentum()};
    state.apply(gradient, applied);

    if (state.history_depth() >= tau + 3) {
      if (const auto mu_hat = measure_total_momentum(state, applied.learning_rate)) {
        state.record_mu_hat(*mu_hat);
        row.mu_hat_T = *mu_hat;
      }
    }
    if (cfg.closed_loop && row.mu_hat_T) {
      const double smoothed = *state.mu_hat_running_mean(cfg.measurement_window);
      state.set_algorithmic_momentum(closed_loop_update(
          state.algorithmic_momentum(), target.momentum, smoothed, cfg.feedback_gain));
    }

    row.mu = applied.momentum;
    row.lr = applied.learning_rate;
    row.sq_dist = sq_dist_to_optimum(objective, state.iterate(0));
    row.loss = objective.loss(state.iterate(0));
    trace.push_back(row);
  }
  return trace;
}

}  // namespace yellowfin
