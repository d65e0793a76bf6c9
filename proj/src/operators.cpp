#include "yellowfin/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "yellowfin/errors.hpp"

namespace yellowfin {

namespace {

// Relative slack on the robust-region inequalities. Boundary points produced
// in floating point (e.g. lr = (1 - sqrt(mu))^2 / h) land a few ulps either
// side of the exact edge; they are classified as inside. Rounding in
// 1 - sqrt(mu) grows like eps / (1 - sqrt(mu)) as mu approaches 1.
constexpr double kEdgeSlack = 1e-14;
constexpr double kEdgeRoundingUlps = 16.0;

void require_positive_curvature(double curvature) {
  if (!(curvature > 0.0) || !std::isfinite(curvature)) {
    throw DomainError("curvature must be positive and finite, got " +
                      std::to_string(curvature));
  }
}

struct Edges {
  double lower;  // (1 - sqrt(mu))^2
  double upper;  // (1 + sqrt(mu))^2
  double slack;  // relative
};

Edges robust_edges(double momentum) {
  const double root = std::sqrt(momentum);
  const double gap = 1.0 - root;
  const double slack =
      kEdgeSlack + kEdgeRoundingUlps * std::numeric_limits<double>::epsilon() / gap;
  return {gap * gap, (1.0 + root) * (1.0 + root), slack};
}

bool within_edges(double gain, const Edges& e) {
  return e.lower * (1.0 - e.slack) <= gain && gain <= e.upper * (1.0 + e.slack);
}

// Discriminant m^2 - 4 mu of the bias characteristic polynomial, written as
// (lower - lr*h) * (upper - lr*h) to avoid cancellation near the edges.
double bias_discriminant(double gain, const Edges& e) {
  return std::max(0.0, (e.lower - gain) * (e.upper - gain));
}

}  // namespace

void Hyperparams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be positive and finite, got " +
                      std::to_string(learning_rate));
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw DomainError("momentum must lie in [0, 1), got " + std::to_string(momentum));
  }
}

void CurvatureRange::validate() const {
  if (!(min > 0.0) || !(max >= min) || !std::isfinite(max)) {
    throw DomainError("curvature range requires 0 < min <= max, got [" +
                      std::to_string(min) + ", " + std::to_string(max) + "]");
  }
}

BiasOperator::BiasOperator(const Hyperparams& hp, double curvature) : momentum_(hp.momentum) {
  require_positive_curvature(curvature);
  hp.validate();
  step_gain_ = hp.learning_rate * curvature;
  const double m = 1.0 - step_gain_ + hp.momentum;
  entries_ = {{{m, -hp.momentum}, {1.0, 0.0}}};
}

VarianceOperator::VarianceOperator(const Hyperparams& hp, double curvature)
    : momentum_(hp.momentum) {
  require_positive_curvature(curvature);
  hp.validate();
  const double mu = hp.momentum;
  step_gain_ = hp.learning_rate * curvature;
  const double m = 1.0 - step_gain_ + mu;
  entries_ = {{{m * m, mu * mu, -2.0 * mu * m}, {1.0, 0.0, 0.0}, {m, 0.0, -mu}}};
}

BiasOperator build_bias_operator(const Hyperparams& hp, double curvature) {
  return BiasOperator(hp, curvature);
}

VarianceOperator build_variance_operator(const Hyperparams& hp, double curvature) {
  return VarianceOperator(hp, curvature);
}

double spectral_radius_bias(const BiasOperator& op) {
  const double mu = op.momentum();
  const double m = op.trace_term();
  const Edges edges = robust_edges(mu);
  const double gain = op.step_gain();
  if (within_edges(gain, edges)) {
    // Complex-conjugate (or double) roots with product mu.
    return std::sqrt(mu);
  }
  return 0.5 * (std::abs(m) + std::sqrt(bias_discriminant(gain, edges)));
}

double spectral_radius_variance(const VarianceOperator& op) {
  const double mu = op.momentum();
  const double m = op.trace_term();
  const Edges edges = robust_edges(mu);
  const double gain = op.step_gain();
  if (within_edges(gain, edges)) {
    // Root mu plus a conjugate pair of modulus mu.
    return mu;
  }
  // Roots of l^2 + (2 mu - m^2) l + mu^2; discriminant m^2 (m^2 - 4 mu).
  const double disc = m * m * bias_discriminant(gain, edges);
  const double dominant = 0.5 * (m * m - 2.0 * mu + std::sqrt(disc));
  return std::max(mu, dominant);
}

bool in_robust_region(const RobustRegionQuery& query) {
  query.hyperparams.validate();
  query.curvature.validate();
  const Edges edges = robust_edges(query.hyperparams.momentum);
  const double lr = query.hyperparams.learning_rate;
  return edges.lower * (1.0 - edges.slack) <= lr * query.curvature.min &&
         lr * query.curvature.max <= edges.upper * (1.0 + edges.slack);
}

double momentum_lower_bound(const CurvatureRange& range) {
  range.validate();
  const double root = std::sqrt(range.condition_number());
  const double ratio = (root - 1.0) / (root + 1.0);
  return ratio * ratio;
}

Hyperparams noiseless_tune(double curvature_min, double curvature_max) {
  const CurvatureRange range{curvature_min, curvature_max};
  const double mu = momentum_lower_bound(range);
  const double gap = 1.0 - std::sqrt(mu);
  return Hyperparams{gap * gap / curvature_min, mu};
}

SpectralRadii spectral_radius_multidim(std::span<const double> hessian_eigenvalues,
                                       const Hyperparams& hp) {
  if (hessian_eigenvalues.empty()) {
    throw DomainError("spectral_radius_multidim needs at least one eigenvalue");
  }
  SpectralRadii out;
  for (const double h : hessian_eigenvalues) {
    out.bias = std::max(out.bias, spectral_radius_bias(build_bias_operator(hp, h)));
    out.variance =
        std::max(out.variance, spectral_radius_variance(build_variance_operator(hp, h)));
  }
  return out;
}

}  // namespace yellowfin
