#include "yellowfin/experiment_config.hpp"

#include <gtest/gtest.h>

#include <string>

namespace yellowfin {
namespace {

const char* kFixed = R"({
  "schema_version": 1,
  "objective": {"kind": "noisy_quadratic", "curvatures": [1.0, 2.0],
                "offsets": [[1.0, -1.0], []]},
  "x0": [1.0, -1.0],
  "mode": "fixed",
  "hyperparams": {"learning_rate": 0.1, "momentum": 0.5},
  "steps": 10,
  "seeds": [3, 4],
  "output": "out/fixed"
})";

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_experiment_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(ExperimentConfig, ParsesFixedMode) {
  const ExperimentConfig cfg = parse_experiment_config(kFixed);
  const auto& q = std::get<QuadraticSpec>(cfg.objective);
  EXPECT_EQ(q.curvatures, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(q.offsets.size(), 2u);
  EXPECT_EQ(cfg.x0, (std::vector<double>{1.0, -1.0}));
  const auto& fixed = std::get<FixedMode>(cfg.mode);
  EXPECT_EQ(fixed.hyperparams.learning_rate, 0.1);
  EXPECT_EQ(fixed.hyperparams.momentum, 0.5);
  EXPECT_EQ(cfg.steps, 10u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(cfg.output, "out/fixed");
  EXPECT_FALSE(cfg.async.has_value());
  const auto objective = build_objective(cfg.objective);
  EXPECT_EQ(objective->dimension(), 2u);
}

TEST(ExperimentConfig, ParsesYellowFinAndAsync) {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "schema_version": 1,
    "objective": {"kind": "two_curvature", "inner": 10.0},
    "x0": [2.0],
    "mode": "yellowfin",
    "tuner": {"smoothing": 0.99, "window_width": 5, "clipping": true,
              "slow_start": false, "log_space_curvature": false,
              "envelope_growth_cap": 50},
    "lr_factor": 2.0,
    "async": {"workers": 4, "closed_loop": true, "gamma": 0.05},
    "steps": 100
  })");
  const auto& toy = std::get<TwoCurvatureSpec>(cfg.objective);
  EXPECT_EQ(toy.inner, 10.0);
  EXPECT_EQ(toy.outer, 1.0);
  const auto& yf = std::get<YellowFinMode>(cfg.mode);
  EXPECT_EQ(yf.config.smoothing, 0.99);
  EXPECT_EQ(yf.config.window_width, 5u);
  EXPECT_TRUE(yf.config.clipping_enabled);
  EXPECT_FALSE(yf.config.slow_start_enabled);
  EXPECT_FALSE(yf.config.log_space_curvature);
  EXPECT_EQ(yf.config.envelope_growth_cap, 50.0);
  EXPECT_EQ(yf.lr_factor, 2.0);
  ASSERT_TRUE(cfg.async.has_value());
  EXPECT_EQ(cfg.async->effective_staleness(), 3u);
  EXPECT_TRUE(cfg.async->closed_loop);
  EXPECT_EQ(cfg.async->feedback_gain, 0.05);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0}));
}

TEST(ExperimentConfig, ParsesScheduleMode) {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "schema_version": 1,
    "objective": {"kind": "noisy_quadratic", "curvatures": [1.0]},
    "x0": [1.0], "mode": "schedule", "steps": 3,
    "schedule": [{"learning_rate": 0.1, "momentum": 0.0},
                 {"learning_rate": 0.2, "momentum": 0.9}]
  })");
  EXPECT_EQ(std::get<ScheduleMode>(cfg.mode).schedule.size(), 2u);
}

TEST(ExperimentConfig, ReportsEveryViolationTogether) {
  const auto v = violations_of(R"({
    "schema_version": 2,
    "objective": {"kind": "noisy_quadratic", "curvatures": [1.0, -2.0], "colour": 1},
    "x0": [1.0],
    "mode": "fixed",
    "hyperparams": {"learning_rate": 0.0, "momentum": 1.0},
    "steps": 0,
    "seeds": [-1],
    "extra": true
  })");
  EXPECT_TRUE(mentions(v, "schema_version"));
  EXPECT_TRUE(mentions(v, "curvatures must all be > 0"));
  EXPECT_TRUE(mentions(v, "objective.colour is not a recognised key"));
  EXPECT_TRUE(mentions(v, "x0 must have 2 entries"));
  EXPECT_TRUE(mentions(v, "learning_rate must be > 0"));
  EXPECT_TRUE(mentions(v, "momentum must lie in [0, 1)"));
  EXPECT_TRUE(mentions(v, "steps must be >= 1"));
  EXPECT_TRUE(mentions(v, "seeds"));
  EXPECT_TRUE(mentions(v, "config.extra is not a recognised key"));
  EXPECT_GE(v.size(), 9u);
}

TEST(ExperimentConfig, ModeSpecificKeys) {
  EXPECT_TRUE(mentions(violations_of(R"({"schema_version": 1,
    "objective": {"kind": "noisy_quadratic", "curvatures": [1.0]},
    "x0": [1.0], "mode": "fixed", "steps": 3})"), "hyperparams is required"));
  EXPECT_TRUE(mentions(violations_of(R"({"schema_version": 1,
    "objective": {"kind": "noisy_quadratic", "curvatures": [1.0]},
    "x0": [1.0], "mode": "yellowfin", "steps": 3,
    "hyperparams": {"learning_rate": 0.1, "momentum": 0.0}})"), "only used in fixed mode"));
  EXPECT_TRUE(mentions(violations_of(R"({"schema_version": 1,
    "objective": {"kind": "noisy_quadratic", "curvatures": [1.0]},
    "x0": [1.0], "mode": "sgd", "steps": 3})"), "mode must be one of"));
  EXPECT_TRUE(mentions(violations_of(R"({"schema_version": 1,
    "objective": {"kind": "cubic"}, "x0": [1.0], "mode": "yellowfin", "steps": 3})"),
                       "kind must be"));
  EXPECT_TRUE(mentions(violations_of(R"({"schema_version": 1,
    "objective": {"kind": "noisy_quadratic", "curvatures": [1.0]},
    "x0": [1.0], "mode": "yellowfin", "steps": 5, "async": {"workers": 16}})"),
                       "staleness + 3"));
}

TEST(ExperimentConfig, MalformedJsonAndTypes) {
  EXPECT_TRUE(mentions(violations_of("{not json"), "malformed JSON"));
  EXPECT_TRUE(mentions(violations_of("[1, 2]"), "must be an object"));
  const auto v = violations_of(R"({"schema_version": "1",
    "objective": {"kind": "two_curvature", "inner": "big"},
    "x0": "origin", "mode": "yellowfin", "steps": 1.5,
    "tuner": {"clipping": "yes"}})");
  EXPECT_TRUE(mentions(v, "schema_version must be a nonnegative integer"));
  EXPECT_TRUE(mentions(v, "inner must be a number"));
  EXPECT_TRUE(mentions(v, "x0 must be an array"));
  EXPECT_TRUE(mentions(v, "steps must be a nonnegative integer"));
  EXPECT_TRUE(mentions(v, "clipping must be true or false"));
}

TEST(ExactVsMcConfig, ParsesAndValidates) {
  const ExactVsMcConfig cfg = parse_exact_vs_mc_config(R"({
    "schema_version": 1, "curvature": 2.0, "gradient_variance": 3.0,
    "hyperparams": {"learning_rate": 0.1, "momentum": 0.5},
    "steps": 20, "runs": 1000, "seed": 9, "output": "t.csv"})");
  EXPECT_EQ(cfg.curvature, 2.0);
  EXPECT_EQ(*cfg.gradient_variance, 3.0);
  EXPECT_EQ(cfg.x0, 1.0);
  EXPECT_EQ(cfg.runs, 1000u);
  EXPECT_EQ(cfg.seed, 9u);
  try {
    parse_exact_vs_mc_config(R"({"schema_version": 1, "curvature": 0,
      "offsets": [1, -1], "gradient_variance": 1, "steps": 0, "runs": 0})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    EXPECT_TRUE(mentions(v, "curvature must be > 0"));
    EXPECT_TRUE(mentions(v, "cannot be combined"));
    EXPECT_TRUE(mentions(v, "hyperparams is required"));
    EXPECT_TRUE(mentions(v, "steps must be >= 1"));
    EXPECT_TRUE(mentions(v, "runs must be >= 1"));
  }
}

TEST(ExperimentConfig, ShippedConfigsParse) {
  for (const char* name : {"fixed_quadratic", "yellowfin_toy", "yellowfin_noisy_quadratic",
                           "async_closed_loop"}) {
    EXPECT_NO_THROW(load_experiment_config(std::string(YELLOWFIN_CONFIG_DIR) + "/" + name + ".json"))
        << name;
  }
  EXPECT_NO_THROW(load_exact_vs_mc_config(std::string(YELLOWFIN_CONFIG_DIR) + "/exact_vs_mc.json"));
  EXPECT_THROW(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

}  // namespace
}  // namespace yellowfin
