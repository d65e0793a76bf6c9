#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "yellowfin/hyperparams.hpp"
#include "yellowfin/measurements.hpp"
#include "yellowfin/objectives.hpp"
#include "yellowfin/trace.hpp"

namespace yellowfin {

struct OptimizerState {
  std::vector<double> current;   // x_t
  std::vector<double> previous;  // x_{t-1}
  std::size_t step = 0;

  /// current = previous = x0.
  static OptimizerState initial(std::span<const double> x0);
};

/// x_{t+1} = x_t - lr * g + momentum * (x_t - x_{t-1}). Throws DivergenceError
/// on a non-finite gradient and DomainError on a dimension mismatch.
OptimizerState momentum_step(const OptimizerState& state, std::span<const double> gradient,
                             const Hyperparams& hp);

struct FixedMode {
  Hyperparams hyperparams;
};

struct YellowFinMode {
  TunerConfig config;
  double lr_factor = 1.0;
};

/// Per-step hyperparameters; the last entry is held once the list runs out.
struct ScheduleMode {
  std::vector<Hyperparams> schedule;
};

using OptimizerMode = std::variant<FixedMode, YellowFinMode, ScheduleMode>;

struct TunedGradient {
  std::vector<double> gradient;  // after clipping
  Hyperparams hyperparams;
  std::optional<MeasurementSnapshot> measurements;
  bool clipped = false;
};

/// Per-step YellowFin pipeline shared by the synchronous and asynchronous
/// loops: clip (when enabled and an h_max estimate exists), tune, and keep
/// the previous hyperparameters when the tuner rejects the gradient.
class TunerDriver {
 public:
  explicit TunerDriver(const YellowFinMode& mode);

  TunedGradient process(std::vector<double> gradient);

  const TunerState& state() const { return state_; }
  const Hyperparams& hyperparams() const { return hyperparams_; }

 private:
  TunerState state_;
  double lr_factor_;
  Hyperparams hyperparams_ = kInitialHyperparams;
  std::optional<MeasurementSnapshot> last_measurements_;
};

/// Squared Euclidean distance between x and the objective's optimum.
double sq_dist_to_optimum(const StochasticObjective& objective, std::span<const double> x);

/// Runs `steps` momentum-SGD updates from x_1 = x_0 and returns one row per
/// step. In YellowFin mode each step samples a gradient, clips it when the
/// tuner config asks for it, updates the tuner and applies the freshly tuned
/// hyperparameters. Deterministic for a given seed.
std::vector<TraceRow> run_experiment(const StochasticObjective& objective,
                                     const OptimizerMode& mode, std::span<const double> x0,
                                     std::size_t steps, std::uint64_t seed);

}  // namespace yellowfin
