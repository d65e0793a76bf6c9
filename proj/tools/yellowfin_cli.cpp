// yellowfin: run experiments, spectral sweeps and exact-vs-Monte-Carlo tables.
//
// Exit codes: 0 ok, 1 usage, 2 validation, 3 divergence.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "yellowfin/commands.hpp"
#include "yellowfin/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

void report(const yellowfin::ConfigError& e) {
  std::cerr << "invalid configuration:\n";
  for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"YellowFin momentum tuner experiments"};
  app.require_subcommand(1);
  // Global options may appear after the subcommand too; subcommands inherit
  // this setting when they are created.
  app.fallthrough();

  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> lr_factor;
  app.add_option("--out", out_path, "Output path (prefix for run)");
  app.add_option("--seed-override", seed_override, "Run a single seed instead of the config's list");
  app.add_option("--lr-factor", lr_factor, "Multiply tuned learning rates by this factor");

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run an experiment config, one CSV per seed plus a mean");
  run->add_option("config", run_config, "JSON experiment config")->required();

  yellowfin::SpectralGrid grid;
  auto* spectral = app.add_subcommand("spectral", "Spectral radii over an (mu, alpha) grid");
  spectral->set_help_flag("--help", "Print this help message and exit");
  spectral->add_option("--h", grid.curvature, "Curvature")->required();
  spectral->add_option("--mu-list", grid.momenta, "Momentum values")->required()->delimiter(',');
  spectral->add_option("--alpha-min", grid.alpha_min, "Smallest learning rate")->capture_default_str();
  spectral->add_option("--alpha-max", grid.alpha_max, "Largest learning rate")->capture_default_str();
  spectral->add_option("--alpha-step", grid.alpha_step, "Learning-rate spacing")->capture_default_str();

  std::string mc_config;
  auto* exact = app.add_subcommand("exact-vs-mc", "Exact expected squared distance against Monte Carlo");
  exact->add_option("config", mc_config, "JSON exact-vs-mc config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      auto cfg = yellowfin::load_experiment_config(run_config);
      yellowfin::apply_overrides(cfg, {out_path, seed_override, lr_factor});
      const auto outputs = yellowfin::run_and_write(cfg);
      for (const auto& f : outputs.seed_files) std::cout << f << '\n';
      std::cout << outputs.aggregate_file << '\n';
    } else if (spectral->parsed()) {
      try {
        grid.validate();
      } catch (const yellowfin::ConfigError& e) {
        report(e);
        return kExitUsage;
      }
      const auto rows = yellowfin::spectral_table(grid);
      if (out_path) {
        std::ofstream file(*out_path);
        if (!file) {
          std::cerr << "cannot open " << *out_path << " for writing\n";
          return kExitValidation;
        }
        yellowfin::write_spectral_csv(file, rows);
      } else {
        yellowfin::write_spectral_csv(std::cout, rows);
      }
    } else if (exact->parsed()) {
      auto cfg = yellowfin::load_exact_vs_mc_config(mc_config);
      if (out_path) cfg.output = *out_path;
      const auto rows = yellowfin::exact_vs_mc_table(cfg);
      std::ofstream file(cfg.output);
      if (!file) {
        std::cerr << "cannot open " << cfg.output << " for writing\n";
        return kExitValidation;
      }
      yellowfin::write_exact_vs_mc_csv(file, rows);
      std::cout << cfg.output << '\n';
    }
  } catch (const yellowfin::ConfigError& e) {
    report(e);
    return kExitValidation;
  } catch (const yellowfin::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const yellowfin::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
