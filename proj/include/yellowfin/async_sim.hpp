#pragma once

// Logical simulation of M asynchronous workers updating a shared model in
// round-robin order: every applied gradient was computed on the model as it
// was tau = M - 1 updates earlier. The loop is sequential and deterministic.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "yellowfin/hyperparams.hpp"
#include "yellowfin/objectives.hpp"
#include "yellowfin/optimizer.hpp"
#include "yellowfin/trace.hpp"

namespace yellowfin {

inline constexpr double kMaxMomentum = 1.0 - 1e-6;

struct AsyncConfig {
  std::size_t workers = 1;
  /// Defaults to workers - 1.
  std::optional<std::size_t> staleness;
  double feedback_gain = 0.01;
  bool closed_loop = false;
  /// Window of the running mean of total-momentum measurements the
  /// controller consumes.
  std::size_t measurement_window = 20;

  std::size_t effective_staleness() const;
  void validate() const;
};

class AsyncState {
 public:
  /// Primes the history with staleness + 2 copies of x0.
  AsyncState(std::span<const double> x0, std::size_t staleness);

  std::size_t staleness() const { return staleness_; }
  /// Number of updates applied so far.
  std::size_t step() const { return step_; }

  /// x_{t-k} for the newest iterate x_t; k = 0 is the newest.
  const std::vector<double>& iterate(std::size_t lag) const;
  /// Step index of x_{t-k}; primed copies of x0 report step 0.
  std::size_t iterate_step(std::size_t lag) const;
  std::size_t history_depth() const { return history_.size(); }

  /// Gradient applied by the most recent update, and the step index of the
  /// iterate it was evaluated at.
  const std::vector<double>& last_gradient() const { return last_gradient_; }
  std::size_t last_gradient_source() const { return last_gradient_source_; }

  double algorithmic_momentum() const { return algorithmic_momentum_; }
  void set_algorithmic_momentum(double mu) { algorithmic_momentum_ = mu; }

  const std::vector<double>& mu_hat_history() const { return mu_hat_history_; }
  void record_mu_hat(double mu_hat) { mu_hat_history_.push_back(mu_hat); }
  /// Mean of the last `window` measurements; absent when none exist.
  std::optional<double> mu_hat_running_mean(std::size_t window) const;

  /// The tau-stale model x_{t - tau} the next gradient must be evaluated at
  /// (the model a worker read tau updates ago).
  const std::vector<double>& stale_model() const { return iterate(staleness_); }

  /// Applies x_{t+1} = x_t + mu (x_t - x_{t-1}) - lr * gradient, where
  /// gradient was evaluated at stale_model().
  void apply(std::span<const double> gradient, const Hyperparams& hp);

 private:
  std::size_t staleness_;
  std::size_t step_ = 0;
  std::deque<std::vector<double>> history_;  // back() is the newest iterate
  std::deque<std::size_t> history_steps_;
  std::vector<double> last_gradient_;
  std::size_t last_gradient_source_ = 0;
  double algorithmic_momentum_ = 0.0;
  std::vector<double> mu_hat_history_;
};

/// Samples a gradient at the tau-stale model and applies it.
void async_step(AsyncState& state, const StochasticObjective& objective, const Hyperparams& hp,
                Rng& rng);

/// Element-wise (x_{t-tau} - x_{t-tau-1} + lr * g) / (x_{t-tau-1} - x_{t-tau-2})
/// with g the gradient evaluated at x_{t-tau-1} (the one applied by the most
/// recent update), median over coordinates whose denominator magnitude is at
/// least 1e-12 * (1 + |x_{t-tau-1}|). Absent when every coordinate is screened
/// out. Throws DomainError before the history holds tau + 3 iterates.
std::optional<double> measure_total_momentum(const AsyncState& state, double learning_rate);

/// clamp(mu + gamma * (target - measured), 0, 1 - 1e-6).
double closed_loop_update(double mu, double mu_target, double mu_hat, double gamma);

/// Externally fixed target (momentum target, learning rate).
struct FixedTarget {
  Hyperparams target;
};

using AsyncTunerMode = std::variant<FixedTarget, YellowFinMode>;

/// Per step: sample the stale gradient; obtain (mu*, lr) from the tuner (or
/// the fixed target); apply the update with the algorithmic momentum (mu*
/// itself in open loop); measure total momentum; in closed loop nudge the
/// algorithmic momentum toward mu* using the running mean of measurements.
std::vector<TraceRow> run_async_experiment(const StochasticObjective& objective,
                                           const AsyncTunerMode& mode, const AsyncConfig& cfg,
                                           std::span<const double> x0, std::size_t steps,
                                           std::uint64_t seed);

}  // namespace yellowfin
