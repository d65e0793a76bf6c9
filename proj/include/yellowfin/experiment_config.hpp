#pragma once

// JSON experiment configuration for the command-line front end. Parsing is
// strict: unknown keys and out-of-domain values are collected and reported
// together before anything runs.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "yellowfin/async_sim.hpp"
#include "yellowfin/hyperparams.hpp"
#include "yellowfin/objectives.hpp"
#include "yellowfin/optimizer.hpp"

namespace yellowfin {

inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct QuadraticSpec {
  std::vector<double> curvatures;
  std::vector<std::vector<double>> offsets;
};

struct TwoCurvatureSpec {
  double inner = 1000.0;
  double outer = 1.0;
  double breakpoint = 1.0;
  double noise_std = 0.0;
};

using ObjectiveSpec = std::variant<QuadraticSpec, TwoCurvatureSpec>;

std::unique_ptr<StochasticObjective> build_objective(const ObjectiveSpec& spec);

struct ExperimentConfig {
  ObjectiveSpec objective;
  std::vector<double> x0;
  OptimizerMode mode;
  std::size_t steps = 1;
  std::vector<std::uint64_t> seeds{0};
  std::optional<AsyncConfig> async;
  std::string output = "trace";
  double lr_factor = 1.0;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Scalar noisy quadratic plus fixed hyperparameters for the exact-vs-Monte
/// Carlo comparison. The noise is given either as explicit offsets or as a
/// target minibatch-gradient variance.
struct ExactVsMcConfig {
  double curvature = 1.0;
  std::vector<double> offsets;
  std::optional<double> gradient_variance;
  Hyperparams hyperparams;
  double x0 = 1.0;
  std::size_t steps = 1;
  std::size_t runs = 100000;
  std::uint64_t seed = 0;
  std::string output = "exact_vs_mc.csv";
};

ExactVsMcConfig parse_exact_vs_mc_config(const std::string& json_text);
ExactVsMcConfig load_exact_vs_mc_config(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace yellowfin
