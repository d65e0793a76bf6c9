#include "yellowfin/commands.hpp"

#include <cmath>
#include <ostream>

#include "yellowfin/operators.hpp"
#include "yellowfin/quadratic_model.hpp"

namespace yellowfin {

void SpectralGrid::validate() const {
  std::vector<std::string> errors;
  if (!(curvature > 0.0) || !std::isfinite(curvature)) errors.push_back("--h must be > 0");
  if (momenta.empty()) errors.push_back("--mu-list must name at least one momentum");
  for (const double mu : momenta) {
    if (!(mu >= 0.0 && mu < 1.0)) {
      errors.push_back("--mu-list entries must lie in [0, 1)");
      break;
    }
  }
  if (!std::isfinite(alpha_min) || !std::isfinite(alpha_max) || alpha_max < alpha_min) {
    errors.push_back("--alpha-min must not exceed --alpha-max");
  }
  if (!(alpha_step > 0.0) || !std::isfinite(alpha_step)) errors.push_back("--alpha-step must be > 0");
  if (alpha_max <= 0.0) errors.push_back("--alpha-max must be > 0");
  if (errors.empty() && (alpha_max - alpha_min) / alpha_step > 1e7) {
    errors.push_back("alpha grid exceeds 10^7 points");
  }
  if (!errors.empty()) throw ConfigError(errors);
}

std::vector<double> SpectralGrid::alphas() const {
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((alpha_max - alpha_min) / alpha_step + 0.5));
  for (std::size_t k = 0; k <= count; ++k) {
    const double a = alpha_min + static_cast<double>(k) * alpha_step;
    if (a > 0.0) out.push_back(a);
  }
  return out;
}

std::vector<SpectralRow> spectral_table(const SpectralGrid& grid) {
  grid.validate();
  std::vector<SpectralRow> rows;
  const std::vector<double> alphas = grid.alphas();
  for (const double mu : grid.momenta) {
    for (const double alpha : alphas) {
      const Hyperparams hp{alpha, mu};
      SpectralRow row;
      row.mu = mu;
      row.alpha = alpha;
      row.rho_A = spectral_radius_bias(build_bias_operator(hp, grid.curvature));
      row.rho_B = spectral_radius_variance(build_variance_operator(hp, grid.curvature));
      row.in_robust_region =
          in_robust_region({hp, CurvatureRange{grid.curvature, grid.curvature}});
      rows.push_back(row);
    }
  }
  return rows;
}

void write_spectral_csv(std::ostream& out, const std::vector<SpectralRow>& rows) {
  out << kSpectralHeader << '\n';
  for (const auto& r : rows) {
    out << format_real(r.mu) << ',' << format_real(r.alpha) << ',' << format_real(r.rho_A) << ','
        << format_real(r.rho_B) << ',' << (r.in_robust_region ? 1 : 0) << '\n';
  }
}

std::vector<ExactVsMcRow> exact_vs_mc_table(const ExactVsMcConfig& cfg) {
  const NoisyQuadratic model =
      cfg.gradient_variance
          ? NoisyQuadratic::with_gradient_variance(cfg.curvature, *cfg.gradient_variance)
          : NoisyQuadratic(cfg.curvature, cfg.offsets);
  const auto exact = exact_expected_sq_dist_curve(model, cfg.hyperparams, cfg.x0, cfg.steps);
  const auto mc =
      monte_carlo_sq_dist_curve(model, cfg.hyperparams, cfg.x0, cfg.steps, cfg.runs, cfg.seed);
  std::vector<ExactVsMcRow> rows(cfg.steps);
  for (std::size_t i = 0; i < cfg.steps; ++i) {
    rows[i] = {i + 1,       exact[i].total, exact[i].bias, exact[i].variance,
               mc[i].mean, mc[i].standard_error};
  }
  return rows;
}

void write_exact_vs_mc_csv(std::ostream& out, const std::vector<ExactVsMcRow>& rows) {
  out << kExactVsMcHeader << '\n';
  for (const auto& r : rows) {
    out << r.t << ',' << format_real(r.exact_total) << ',' << format_real(r.exact_bias) << ','
        << format_real(r.exact_variance) << ',' << format_real(r.mc_estimate) << ','
        << format_real(r.mc_stderr) << '\n';
  }
}

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides) {
  if (overrides.output) cfg.output = *overrides.output;
  if (overrides.seed) cfg.seeds = {*overrides.seed};
  if (overrides.lr_factor) {
    if (!(*overrides.lr_factor > 0.0) || !std::isfinite(*overrides.lr_factor)) {
      throw ConfigError({"--lr-factor must be > 0"});
    }
    cfg.lr_factor = *overrides.lr_factor;
    if (auto* yf = std::get_if<YellowFinMode>(&cfg.mode)) yf->lr_factor = cfg.lr_factor;
  }
}

std::vector<std::vector<TraceRow>> run_traces(const ExperimentConfig& cfg) {
  const auto objective = build_objective(cfg.objective);
  std::vector<std::vector<TraceRow>> traces;
  traces.reserve(cfg.seeds.size());
  for (const std::uint64_t seed : cfg.seeds) {
    if (cfg.async) {
      AsyncTunerMode mode;
      if (const auto* fixed = std::get_if<FixedMode>(&cfg.mode)) {
        mode = FixedTarget{fixed->hyperparams};
      } else {
        mode = std::get<YellowFinMode>(cfg.mode);
      }
      traces.push_back(
          run_async_experiment(*objective, mode, *cfg.async, cfg.x0, cfg.steps, seed));
    } else {
      traces.push_back(run_experiment(*objective, cfg.mode, cfg.x0, cfg.steps, seed));
    }
  }
  return traces;
}

RunOutputs run_and_write(const ExperimentConfig& cfg) {
  const auto traces = run_traces(cfg);
  RunOutputs out;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::string path = cfg.output + "_seed" + std::to_string(cfg.seeds[i]) + ".csv";
    write_trace_csv(path, traces[i]);
    out.seed_files.push_back(path);
  }
  out.aggregate_file = cfg.output + "_mean.csv";
  write_trace_csv(out.aggregate_file, aggregate_traces(traces));
  return out;
}

}  // namespace yellowfin
