#include "yellowfin/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "yellowfin/errors.hpp"

namespace yellowfin {

namespace {

void require_dimension(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) {
    throw DomainError("expected a point of dimension " + std::to_string(dim) + ", got " +
                      std::to_string(x.size()));
  }
}

}  // namespace

NoisyQuadraticObjective::NoisyQuadraticObjective(std::vector<double> curvatures,
                                                 std::vector<std::vector<double>> offsets_per_dim)
    : curvatures_(std::move(curvatures)) {
  if (curvatures_.empty()) throw DomainError("noisy quadratic needs at least one curvature");
  for (const double h : curvatures_) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw DomainError("curvatures must be positive and finite, got " + std::to_string(h));
    }
  }
  const std::size_t dim = curvatures_.size();
  if (!offsets_per_dim.empty() && offsets_per_dim.size() != dim) {
    throw DomainError("offsets must be given for every dimension or not at all");
  }
  components_ = 1;
  for (const auto& list : offsets_per_dim) {
    if (list.empty()) continue;
    if (components_ != 1 && list.size() != components_) {
      throw DomainError("every dimension must have the same number of offsets");
    }
    components_ = list.size();
  }
  offsets_.assign(components_ * dim, 0.0);
  for (std::size_t d = 0; d < offsets_per_dim.size(); ++d) {
    const auto& list = offsets_per_dim[d];
    if (list.empty()) continue;
    const double mean =
        std::accumulate(list.begin(), list.end(), 0.0) / static_cast<double>(list.size());
    for (std::size_t i = 0; i < components_; ++i) {
      if (!std::isfinite(list[i])) throw DomainError("offsets must be finite");
      offsets_[i * dim + d] = list[i] - mean;
    }
  }
}

double NoisyQuadraticObjective::offset(std::size_t component, std::size_t dim) const {
  return offsets_.at(component * dimension() + dim);
}

std::vector<double> NoisyQuadraticObjective::sample_gradient(std::span<const double> x,
                                                             Rng& rng) const {
  require_dimension(x, dimension());
  std::uniform_int_distribution<std::size_t> pick(0, components_ - 1);
  const std::size_t i = pick(rng);
  std::vector<double> g(dimension());
  for (std::size_t d = 0; d < g.size(); ++d) {
    g[d] = curvatures_[d] * (x[d] - offsets_[i * dimension() + d]);
  }
  return g;
}

std::vector<double> NoisyQuadraticObjective::full_gradient(std::span<const double> x) const {
  require_dimension(x, dimension());
  std::vector<double> g(dimension());
  for (std::size_t d = 0; d < g.size(); ++d) g[d] = curvatures_[d] * x[d];
  return g;
}

std::optional<double> NoisyQuadraticObjective::loss(std::span<const double> x) const {
  require_dimension(x, dimension());
  double total = 0.0;
  for (std::size_t i = 0; i < components_; ++i) {
    for (std::size_t d = 0; d < dimension(); ++d) {
      const double r = x[d] - offsets_[i * dimension() + d];
      total += 0.5 * curvatures_[d] * r * r;
    }
  }
  return total / static_cast<double>(components_);
}

double NoisyQuadraticObjective::gradient_variance() const {
  double total = 0.0;
  for (std::size_t d = 0; d < dimension(); ++d) {
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < components_; ++i) {
      const double c = offsets_[i * dimension() + d];
      sum_sq += c * c;
    }
    total += curvatures_[d] * curvatures_[d] * sum_sq / static_cast<double>(components_);
  }
  return total;
}

PiecewiseCurvatureObjective::PiecewiseCurvatureObjective(double inner_curvature,
                                                         double outer_curvature,
                                                         double breakpoint,
                                                         double additive_noise_std)
    : inner_(inner_curvature),
      outer_(outer_curvature),
      breakpoint_(breakpoint),
      noise_std_(additive_noise_std) {
  if (!(inner_ > 0.0) || !(outer_ > 0.0) || !(breakpoint_ > 0.0)) {
    throw DomainError("two-curvature objective needs positive curvatures and breakpoint");
  }
  if (!(noise_std_ >= 0.0)) throw DomainError("noise standard deviation must be >= 0");
}

double PiecewiseCurvatureObjective::curvature_at(double x) const {
  return std::abs(x) <= breakpoint_ ? inner_ : outer_;
}

double PiecewiseCurvatureObjective::condition_number() const {
  return std::max(inner_, outer_) / std::min(inner_, outer_);
}

std::vector<double> PiecewiseCurvatureObjective::sample_gradient(std::span<const double> x,
                                                                 Rng& rng) const {
  std::vector<double> g = full_gradient(x);
  if (noise_std_ > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std_);
    g[0] += noise(rng);
  }
  return g;
}

std::vector<double> PiecewiseCurvatureObjective::full_gradient(std::span<const double> x) const {
  require_dimension(x, 1);
  return {curvature_at(x[0]) * x[0]};
}

std::optional<double> PiecewiseCurvatureObjective::loss(std::span<const double> x) const {
  require_dimension(x, 1);
  const double r = std::abs(x[0]);
  if (r <= breakpoint_) return 0.5 * inner_ * r * r;
  return 0.5 * inner_ * breakpoint_ * breakpoint_ +
         0.5 * outer_ * (r * r - breakpoint_ * breakpoint_);
}

NoisyQuadraticObjective make_noisy_quadratic(std::vector<double> curvatures,
                                             std::vector<std::vector<double>> offsets_per_dim) {
  return NoisyQuadraticObjective(std::move(curvatures), std::move(offsets_per_dim));
}

PiecewiseCurvatureObjective make_two_curvature_toy(double inner, double outer, double breakpoint) {
  return PiecewiseCurvatureObjective(inner, outer, breakpoint);
}

double generalized_curvature(const StochasticObjective& objective, std::span<const double> x,
                             std::size_t coordinate) {
  if (coordinate >= objective.dimension()) throw DomainError("coordinate out of range");
  const std::vector<double> opt = objective.optimum();
  const double offset = x[coordinate] - opt[coordinate];
  if (offset == 0.0) throw DomainError("generalized curvature is undefined at the optimum");
  return objective.full_gradient(x)[coordinate] / offset;
}

}  // namespace yellowfin
