#pragma once

// Library side of the command-line subcommands, kept out of main() so the
// emitted tables can be tested directly.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "yellowfin/experiment_config.hpp"
#include "yellowfin/trace.hpp"

namespace yellowfin {

struct SpectralGrid {
  double curvature = 1.0;
  std::vector<double> momenta;
  double alpha_min = 0.0;
  double alpha_max = 4.0;
  double alpha_step = 0.01;

  /// Throws ConfigError listing every problem.
  void validate() const;
  /// alpha_min + k * alpha_step for k = 0, 1, ... up to alpha_max (inclusive
  /// within half a step); non-positive learning rates are dropped.
  std::vector<double> alphas() const;
};

struct SpectralRow {
  double mu = 0.0;
  double alpha = 0.0;
  double rho_A = 0.0;
  double rho_B = 0.0;
  bool in_robust_region = false;
};

inline constexpr const char* kSpectralHeader = "mu,alpha,rho_A,rho_B,in_robust_region";

std::vector<SpectralRow> spectral_table(const SpectralGrid& grid);
void write_spectral_csv(std::ostream& out, const std::vector<SpectralRow>& rows);

struct ExactVsMcRow {
  std::size_t t = 0;
  double exact_total = 0.0;
  double exact_bias = 0.0;
  double exact_variance = 0.0;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
};

inline constexpr const char* kExactVsMcHeader =
    "t,exact_total,exact_bias,exact_variance,mc_estimate,mc_stderr";

std::vector<ExactVsMcRow> exact_vs_mc_table(const ExactVsMcConfig& cfg);
void write_exact_vs_mc_csv(std::ostream& out, const std::vector<ExactVsMcRow>& rows);

struct RunOverrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr_factor;
};

/// Applies command-line overrides to a parsed config (re-validating them).
void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides);

/// One trace per seed, synchronous or asynchronous as configured.
std::vector<std::vector<TraceRow>> run_traces(const ExperimentConfig& cfg);

struct RunOutputs {
  std::vector<std::string> seed_files;
  std::string aggregate_file;
};

/// Runs every seed and writes <output>_seed<k>.csv plus <output>_mean.csv.
RunOutputs run_and_write(const ExperimentConfig& cfg);

}  // namespace yellowfin
