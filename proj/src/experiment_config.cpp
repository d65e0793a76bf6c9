#include "yellowfin/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "yellowfin/errors.hpp"

namespace yellowfin {

using nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  - " + l;
  return out;
}

// Walks one JSON object, recording every violation instead of stopping at
// the first one.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {
    if (!node_.is_object()) fail(path_, "must be an object");
  }

  bool ok() const { return node_.is_object(); }

  bool has(const std::string& key) {
    seen_.insert(key);
    return ok() && node_.contains(key);
  }

  const json* get(const std::string& key) {
    if (!has(key)) return nullptr;
    return &node_.at(key);
  }

  std::optional<double> real(const std::string& key, bool required) {
    const json* v = get(key);
    if (!v) {
      if (required) fail(key, "is required");
      return std::nullopt;
    }
    if (!v->is_number()) {
      fail(key, "must be a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(key, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> count(const std::string& key, bool required) {
    const json* v = get(key);
    if (!v) {
      if (required) fail(key, "is required");
      return std::nullopt;
    }
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      fail(key, "must be a nonnegative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<bool> flag(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      fail(key, "must be true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::string> text(const std::string& key, bool required) {
    const json* v = get(key);
    if (!v) {
      if (required) fail(key, "is required");
      return std::nullopt;
    }
    if (!v->is_string()) {
      fail(key, "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> reals(const std::string& key, bool required) {
    const json* v = get(key);
    if (!v) {
      if (required) fail(key, "is required");
      return std::nullopt;
    }
    return to_reals(*v, path_ + "." + key);
  }

  std::optional<std::vector<double>> to_reals(const json& v, const std::string& where) {
    if (!v.is_array()) {
      errors_.push_back(where + " must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        errors_.push_back(where + " must contain only finite numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void fail(const std::string& key, const std::string& what) {
    errors_.push_back((key == path_ ? path_ : path_ + "." + key) + " " + what);
  }

  /// Reports keys that were never asked for.
  void reject_unknown() {
    if (!ok()) return;
    for (const auto& [key, _] : node_.items()) {
      if (!seen_.count(key)) errors_.push_back(path_ + "." + key + " is not a recognised key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
}

void check_schema_version(ObjectReader& root) {
  const auto version = root.count("schema_version", true);
  if (version && *version != static_cast<std::uint64_t>(kConfigSchemaVersion)) {
    root.fail("schema_version", "must be " + std::to_string(kConfigSchemaVersion));
  }
}

std::optional<Hyperparams> read_hyperparams(const json& node, const std::string& path,
                                            std::vector<std::string>& errors) {
  ObjectReader r(node, path, errors);
  if (!r.ok()) return std::nullopt;
  const auto lr = r.real("learning_rate", true);
  const auto mu = r.real("momentum", true);
  r.reject_unknown();
  if (!lr || !mu) return std::nullopt;
  const Hyperparams hp{*lr, *mu};
  if (!(hp.learning_rate > 0.0)) r.fail("learning_rate", "must be > 0");
  if (!(hp.momentum >= 0.0 && hp.momentum < 1.0)) r.fail("momentum", "must lie in [0, 1)");
  return hp;
}

std::optional<ObjectiveSpec> read_objective(const json& node, std::vector<std::string>& errors) {
  ObjectReader r(node, "objective", errors);
  if (!r.ok()) return std::nullopt;
  const auto kind = r.text("kind", true);
  if (!kind) {
    r.reject_unknown();
    return std::nullopt;
  }
  if (*kind == "noisy_quadratic") {
    QuadraticSpec spec;
    if (auto h = r.reals("curvatures", true)) spec.curvatures = *h;
    if (spec.curvatures.empty()) r.fail("curvatures", "must be a non-empty list");
    for (const double h : spec.curvatures) {
      if (!(h > 0.0)) {
        r.fail("curvatures", "must all be > 0");
        break;
      }
    }
    if (const json* offs = r.get("offsets")) {
      if (!offs->is_array()) {
        r.fail("offsets", "must be a list of per-dimension offset lists");
      } else {
        std::size_t n = 0;
        for (std::size_t d = 0; d < offs->size(); ++d) {
          auto list = r.to_reals((*offs)[d], "objective.offsets[" + std::to_string(d) + "]");
          if (!list) continue;
          if (!list->empty()) {
            if (n != 0 && list->size() != n) {
              r.fail("offsets", "lists must share one length");
            }
            n = list->size();
          }
          spec.offsets.push_back(*list);
        }
        if (!spec.offsets.empty() && spec.offsets.size() != spec.curvatures.size()) {
          r.fail("offsets", "must have one list per curvature");
        }
      }
    }
    r.reject_unknown();
    return spec;
  }
  if (*kind == "two_curvature") {
    TwoCurvatureSpec spec;
    if (auto v = r.real("inner", false)) spec.inner = *v;
    if (auto v = r.real("outer", false)) spec.outer = *v;
    if (auto v = r.real("breakpoint", false)) spec.breakpoint = *v;
    if (auto v = r.real("noise_std", false)) spec.noise_std = *v;
    if (!(spec.inner > 0.0)) r.fail("inner", "must be > 0");
    if (!(spec.outer > 0.0)) r.fail("outer", "must be > 0");
    if (!(spec.breakpoint > 0.0)) r.fail("breakpoint", "must be > 0");
    if (!(spec.noise_std >= 0.0)) r.fail("noise_std", "must be >= 0");
    r.reject_unknown();
    return spec;
  }
  r.fail("kind", "must be \"noisy_quadratic\" or \"two_curvature\", got \"" + *kind + "\"");
  r.reject_unknown();
  return std::nullopt;
}

TunerConfig read_tuner(const json* node, std::vector<std::string>& errors) {
  TunerConfig cfg;
  if (!node) return cfg;
  ObjectReader r(*node, "tuner", errors);
  if (!r.ok()) return cfg;
  if (auto v = r.real("smoothing", false)) cfg.smoothing = *v;
  if (auto v = r.count("window_width", false)) cfg.window_width = *v;
  if (auto v = r.real("envelope_growth_cap", false)) cfg.envelope_growth_cap = *v;
  if (auto v = r.flag("clipping")) cfg.clipping_enabled = *v;
  if (auto v = r.flag("slow_start")) cfg.slow_start_enabled = *v;
  if (auto v = r.flag("log_space_curvature")) cfg.log_space_curvature = *v;
  if (!(cfg.smoothing > 0.0 && cfg.smoothing < 1.0)) r.fail("smoothing", "must lie in (0, 1)");
  if (cfg.window_width < 1) r.fail("window_width", "must be >= 1");
  if (!(cfg.envelope_growth_cap > 1.0)) r.fail("envelope_growth_cap", "must be > 1");
  r.reject_unknown();
  return cfg;
}

std::optional<AsyncConfig> read_async(const json* node, std::vector<std::string>& errors) {
  if (!node) return std::nullopt;
  AsyncConfig cfg;
  ObjectReader r(*node, "async", errors);
  if (!r.ok()) return std::nullopt;
  if (auto v = r.count("workers", true)) cfg.workers = *v;
  if (auto v = r.count("staleness", false)) cfg.staleness = *v;
  if (auto v = r.real("gamma", false)) cfg.feedback_gain = *v;
  if (auto v = r.flag("closed_loop")) cfg.closed_loop = *v;
  if (auto v = r.count("measurement_window", false)) cfg.measurement_window = *v;
  if (cfg.workers < 1) r.fail("workers", "must be >= 1");
  if (!(cfg.feedback_gain > 0.0)) r.fail("gamma", "must be > 0");
  if (cfg.measurement_window < 1) r.fail("measurement_window", "must be >= 1");
  r.reject_unknown();
  return cfg;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

std::unique_ptr<StochasticObjective> build_objective(const ObjectiveSpec& spec) {
  if (const auto* q = std::get_if<QuadraticSpec>(&spec)) {
    return std::make_unique<NoisyQuadraticObjective>(q->curvatures, q->offsets);
  }
  const auto& toy = std::get<TwoCurvatureSpec>(spec);
  return std::make_unique<PiecewiseCurvatureObjective>(toy.inner, toy.outer, toy.breakpoint,
                                                       toy.noise_std);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read " + path});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json root_node = parse_json(json_text);
  std::vector<std::string> errors;
  ObjectReader root(root_node, "config", errors);
  if (!root.ok()) throw ConfigError(errors);
  ExperimentConfig cfg;

  check_schema_version(root);

  std::size_t dimension = 0;
  if (const json* obj = root.get("objective")) {
    if (auto spec = read_objective(*obj, errors)) {
      cfg.objective = *spec;
      if (const auto* q = std::get_if<QuadraticSpec>(&cfg.objective)) {
        dimension = q->curvatures.size();
      } else {
        dimension = 1;
      }
    }
  } else {
    root.fail("objective", "is required");
  }

  if (auto x0 = root.reals("x0", true)) {
    cfg.x0 = *x0;
    if (dimension != 0 && cfg.x0.size() != dimension) {
      root.fail("x0", "must have " + std::to_string(dimension) + " entries");
    }
  }

  const auto mode = root.text("mode", true);
  const json* hp_node = root.get("hyperparams");
  const json* schedule_node = root.get("schedule");
  const json* tuner_node = root.get("tuner");
  const TunerConfig tuner = read_tuner(tuner_node, errors);
  if (auto f = root.real("lr_factor", false)) cfg.lr_factor = *f;
  if (!(cfg.lr_factor > 0.0)) root.fail("lr_factor", "must be > 0");

  if (mode) {
    if (*mode == "fixed") {
      if (!hp_node) {
        root.fail("hyperparams", "is required in fixed mode");
      } else if (auto hp = read_hyperparams(*hp_node, "hyperparams", errors)) {
        cfg.mode = FixedMode{*hp};
      }
    } else if (*mode == "yellowfin") {
      cfg.mode = YellowFinMode{tuner, cfg.lr_factor};
    } else if (*mode == "schedule") {
      ScheduleMode sched;
      if (!schedule_node || !schedule_node->is_array() || schedule_node->empty()) {
        root.fail("schedule", "must be a non-empty list in schedule mode");
      } else {
        for (std::size_t i = 0; i < schedule_node->size(); ++i) {
          if (auto hp = read_hyperparams((*schedule_node)[i],
                                         "schedule[" + std::to_string(i) + "]", errors)) {
            sched.schedule.push_back(*hp);
          }
        }
      }
      cfg.mode = sched;
    } else {
      root.fail("mode", "must be one of fixed, yellowfin, schedule");
    }
    if (*mode != "fixed" && hp_node) root.fail("hyperparams", "is only used in fixed mode");
    if (*mode != "schedule" && schedule_node) root.fail("schedule", "is only used in schedule mode");
    if (*mode != "yellowfin" && tuner_node) root.fail("tuner", "is only used in yellowfin mode");
  }

  if (auto steps = root.count("steps", true)) {
    cfg.steps = *steps;
    if (cfg.steps < 1) root.fail("steps", "must be >= 1");
  }
  if (const json* seeds = root.get("seeds")) {
    cfg.seeds.clear();
    if (!seeds->is_array() || seeds->empty()) {
      root.fail("seeds", "must be a non-empty list of nonnegative integers");
    } else {
      for (const auto& s : *seeds) {
        if (!s.is_number_unsigned()) {
          root.fail("seeds", "must be a non-empty list of nonnegative integers");
          break;
        }
        cfg.seeds.push_back(s.get<std::uint64_t>());
      }
    }
  }
  cfg.async = read_async(root.get("async"), errors);
  if (cfg.async) {
    if (mode && *mode == "schedule") root.fail("async", "does not support schedule mode");
    if (cfg.steps < cfg.async->effective_staleness() + 3) {
      root.fail("steps", "must be at least staleness + 3 for asynchronous runs");
    }
  }
  if (auto out = root.text("output", false)) cfg.output = *out;

  root.reject_unknown();
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

ExactVsMcConfig parse_exact_vs_mc_config(const std::string& json_text) {
  const json root_node = parse_json(json_text);
  std::vector<std::string> errors;
  ObjectReader root(root_node, "config", errors);
  if (!root.ok()) throw ConfigError(errors);
  ExactVsMcConfig cfg;

  check_schema_version(root);
  if (auto h = root.real("curvature", true)) cfg.curvature = *h;
  if (!(cfg.curvature > 0.0)) root.fail("curvature", "must be > 0");
  const bool has_offsets = root.has("offsets");
  const bool has_variance = root.has("gradient_variance");
  if (has_offsets && has_variance) {
    root.fail("offsets", "cannot be combined with gradient_variance");
  }
  if (auto offs = root.reals("offsets", false)) cfg.offsets = *offs;
  if (auto v = root.real("gradient_variance", false)) {
    cfg.gradient_variance = *v;
    if (!(*v >= 0.0)) root.fail("gradient_variance", "must be >= 0");
  }
  if (const json* hp = root.get("hyperparams")) {
    if (auto parsed = read_hyperparams(*hp, "hyperparams", errors)) cfg.hyperparams = *parsed;
  } else {
    root.fail("hyperparams", "is required");
  }
  if (auto x0 = root.real("x0", false)) cfg.x0 = *x0;
  if (auto steps = root.count("steps", true)) cfg.steps = *steps;
  if (cfg.steps < 1) root.fail("steps", "must be >= 1");
  if (auto runs = root.count("runs", false)) cfg.runs = *runs;
  if (cfg.runs < 1) root.fail("runs", "must be >= 1");
  if (auto seed = root.count("seed", false)) cfg.seed = *seed;
  if (auto out = root.text("output", false)) cfg.output = *out;
  root.reject_unknown();
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

ExactVsMcConfig load_exact_vs_mc_config(const std::string& path) {
  return parse_exact_vs_mc_config(read_text_file(path));
}

}  // namespace yellowfin
