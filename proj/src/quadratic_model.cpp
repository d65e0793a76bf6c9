#include "yellowfin/quadratic_model.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "yellowfin/errors.hpp"

namespace yellowfin {

NoisyQuadratic::NoisyQuadratic(double curvature, std::vector<double> offsets)
    : curvature_(curvature), offsets_(std::move(offsets)) {
  if (!(curvature_ > 0.0) || !std::isfinite(curvature_)) {
    throw DomainError("noisy quadratic curvature must be positive, got " +
                      std::to_string(curvature_));
  }
  if (offsets_.empty()) {
    offsets_.push_back(0.0);
  }
  for (const double c : offsets_) {
    if (!std::isfinite(c)) throw DomainError("noisy quadratic offsets must be finite");
  }
  const double mean =
      std::accumulate(offsets_.begin(), offsets_.end(), 0.0) / static_cast<double>(offsets_.size());
  for (double& c : offsets_) c -= mean;
}

NoisyQuadratic NoisyQuadratic::with_gradient_variance(double curvature, double gradient_variance) {
  if (!(gradient_variance >= 0.0)) {
    throw DomainError("gradient variance must be nonnegative");
  }
  if (!(curvature > 0.0)) {
    throw DomainError("noisy quadratic curvature must be positive");
  }
  const double c = std::sqrt(gradient_variance) / curvature;
  return NoisyQuadratic(curvature, {c, -c});
}

double NoisyQuadratic::offset_constant() const {
  double sum_sq = 0.0;
  for (const double c : offsets_) sum_sq += curvature_ * c * c;
  return sum_sq / (2.0 * static_cast<double>(offsets_.size()));
}

double NoisyQuadratic::gradient_variance() const {
  double sum_sq = 0.0;
  for (const double c : offsets_) sum_sq += c * c;
  return curvature_ * curvature_ * sum_sq / static_cast<double>(offsets_.size());
}

MomentState MomentState::initial(double x0) {
  MomentState s;
  s.mean_pair = {x0, x0};
  s.second_moments = {0.0, 0.0, 0.0};
  s.step = 0;
  return s;
}

MomentState iterate_moments(const NoisyQuadratic& model, const Hyperparams& hp,
                            const MomentState& state) {
  hp.validate();
  const double mu = hp.momentum;
  const double m = 1.0 - hp.learning_rate * model.curvature() + mu;
  const double source = hp.learning_rate * hp.learning_rate * model.gradient_variance();

  const auto [x_next, x_cur] = state.mean_pair;
  const auto [u_next, u_cur, v_next] = state.second_moments;

  MomentState out;
  out.mean_pair = {m * x_next - mu * x_cur, x_next};
  out.second_moments = {m * m * u_next + mu * mu * u_cur - 2.0 * mu * m * v_next + source,
                        u_next, m * u_next - mu * v_next};
  out.step = state.step + 1;
  return out;
}

std::vector<SquaredDistance> exact_expected_sq_dist_curve(const NoisyQuadratic& model,
                                                          const Hyperparams& hp, double x0,
                                                          std::size_t steps) {
  std::vector<SquaredDistance> curve;
  curve.reserve(steps);
  MomentState state = MomentState::initial(x0);
  for (std::size_t t = 0; t < steps; ++t) {
    state = iterate_moments(model, hp, state);
    const double bias = state.mean_pair[0] * state.mean_pair[0];
    const double variance = state.second_moments[0];
    curve.push_back({bias + variance, bias, variance});
  }
  return curve;
}

SquaredDistance exact_expected_sq_dist(const NoisyQuadratic& model, const Hyperparams& hp,
                                       double x0, std::size_t steps) {
  if (steps == 0) {
    return {x0 * x0, x0 * x0, 0.0};
  }
  MomentState state = MomentState::initial(x0);
  for (std::size_t t = 0; t < steps; ++t) state = iterate_moments(model, hp, state);
  const double bias = state.mean_pair[0] * state.mean_pair[0];
  const double variance = state.second_moments[0];
  return {bias + variance, bias, variance};
}

double surrogate_expected_sq_dist(double rho_bias, double rho_var, double learning_rate,
                                  double noise, double x0_sq_dist, std::size_t steps) {
  if (!(rho_bias >= 0.0 && rho_bias < 1.0) || !(rho_var >= 0.0 && rho_var < 1.0)) {
    throw DomainError("surrogate requires spectral radii in [0, 1)");
  }
  if (!(learning_rate > 0.0) || !(noise >= 0.0) || !(x0_sq_dist >= 0.0)) {
    throw DomainError("surrogate requires lr > 0, C >= 0 and a nonnegative distance");
  }
  const double t = static_cast<double>(steps);
  const double bias = std::pow(rho_bias, 2.0 * t) * x0_sq_dist;
  const double variance =
      (1.0 - std::pow(rho_var, t)) * learning_rate * learning_rate * noise / (1.0 - rho_var);
  return bias + variance;
}

std::vector<MonteCarloEstimate> monte_carlo_sq_dist_curve(const NoisyQuadratic& model,
                                                          const Hyperparams& hp, double x0,
                                                          std::size_t steps, std::size_t runs,
                                                          std::uint64_t seed) {
  hp.validate();
  if (runs == 0) throw DomainError("monte carlo needs at least one run");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, model.component_count() - 1);
  const double h = model.curvature();
  const double lr = hp.learning_rate;
  const double mu = hp.momentum;
  const double m = 1.0 - lr * h + mu;
  const auto& offsets = model.offsets();

  // Welford accumulation of the squared distance at every step.
  std::vector<double> mean(steps, 0.0);
  std::vector<double> m2(steps, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    double prev = x0;
    double cur = x0;
    const double n = static_cast<double>(r + 1);
    for (std::size_t t = 0; t < steps; ++t) {
      // Same association as the mean recurrence, so noiseless runs match it bit for bit.
      const double next = m * cur - mu * prev + lr * h * offsets[pick(rng)];
      prev = cur;
      cur = next;
      const double sample = cur * cur;
      const double delta = sample - mean[t];
      mean[t] += delta / n;
      m2[t] += delta * (sample - mean[t]);
    }
  }
  std::vector<MonteCarloEstimate> out(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    out[t].mean = mean[t];
    out[t].runs = runs;
    out[t].standard_error =
        runs > 1 ? std::sqrt(m2[t] / static_cast<double>(runs - 1) / static_cast<double>(runs))
                 : 0.0;
  }
  return out;
}

MonteCarloEstimate monte_carlo_sq_dist(const NoisyQuadratic& model, const Hyperparams& hp,
                                       double x0, std::size_t steps, std::size_t runs,
                                       std::uint64_t seed) {
  if (steps == 0) {
    hp.validate();
    if (runs == 0) throw DomainError("monte carlo needs at least one run");
    return {x0 * x0, 0.0, runs};
  }
  return monte_carlo_sq_dist_curve(model, hp, x0, steps, runs, seed).back();
}

}  // namespace yellowfin
