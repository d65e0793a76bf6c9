#include "yellowfin/objectives.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "yellowfin/errors.hpp"

namespace yellowfin {
namespace {

TEST(NoisyQuadraticObjective, OneDimensionalExample) {
  const auto q = make_noisy_quadratic({1.0}, {{1.0, -1.0}});
  const std::vector<double> x{2.0};
  EXPECT_EQ(q.full_gradient(x)[0], 2.0);
  Rng rng(1);
  std::set<double> seen;
  for (int i = 0; i < 200; ++i) seen.insert(q.sample_gradient(x, rng)[0]);
  EXPECT_EQ(seen, (std::set<double>{1.0, 3.0}));
  EXPECT_DOUBLE_EQ(q.gradient_variance(), 1.0);
  EXPECT_EQ(q.component_count(), 2u);
}

TEST(NoisyQuadraticObjective, SampledVarianceMatchesTheConstant) {
  const auto q = make_noisy_quadratic({1.0}, {{1.0, -1.0}});
  Rng rng(2);
  const int n = 200000;
  for (const double at : {-3.0, 0.0, 5.0}) {
    const std::vector<double> x{at};
    const double mean = q.full_gradient(x)[0];
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = q.sample_gradient(x, rng)[0] - mean;
      sum += e;
      sum_sq += e * e;
    }
    // Samples are exactly +-1 around the mean.
    EXPECT_DOUBLE_EQ(sum_sq / n, 1.0);
    EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  }
}

TEST(NoisyQuadraticObjective, NoiselessTwoDimensional) {
  const auto q = make_noisy_quadratic({1.0, 1000.0}, {});
  const std::vector<double> x{0.5, -0.25};
  Rng rng(3);
  const auto g = q.sample_gradient(x, rng);
  EXPECT_EQ(g, (std::vector<double>{0.5, -250.0}));
  EXPECT_EQ(q.full_gradient(x), g);
  EXPECT_EQ(q.gradient_variance(), 0.0);
  EXPECT_DOUBLE_EQ(*q.loss(x), 0.5 * 0.25 + 0.5 * 1000.0 * 0.0625);
}

TEST(NoisyQuadraticObjective, OffsetsAreCenteredAndUnbiased) {
  const auto q = make_noisy_quadratic({2.0, 3.0}, {{1.0, 2.0, 6.0}, {}});
  EXPECT_DOUBLE_EQ(q.offset(0, 0), -2.0);
  EXPECT_DOUBLE_EQ(q.offset(2, 0), 3.0);
  EXPECT_EQ(q.offset(1, 1), 0.0);
  const std::vector<double> x{0.7, -1.1};
  std::vector<double> mean(2, 0.0);
  for (std::size_t i = 0; i < q.component_count(); ++i) {
    for (std::size_t d = 0; d < 2; ++d) {
      mean[d] += q.curvatures()[d] * (x[d] - q.offset(i, d)) / 3.0;
    }
  }
  EXPECT_NEAR(mean[0], q.full_gradient(x)[0], 1e-15);
  EXPECT_NEAR(mean[1], q.full_gradient(x)[1], 1e-15);
  EXPECT_DOUBLE_EQ(q.gradient_variance(), 4.0 * (4.0 + 1.0 + 9.0) / 3.0);
}

TEST(NoisyQuadraticObjective, Validation) {
  EXPECT_THROW(make_noisy_quadratic({}, {}), DomainError);
  EXPECT_THROW(make_noisy_quadratic({1.0, -1.0}, {}), DomainError);
  EXPECT_THROW(make_noisy_quadratic({1.0, 1.0}, {{1.0}}), DomainError);
  EXPECT_THROW(make_noisy_quadratic({1.0, 1.0}, {{1.0, 2.0}, {1.0, 2.0, 3.0}}), DomainError);
  const auto q = make_noisy_quadratic({1.0}, {});
  EXPECT_THROW(q.full_gradient(std::vector<double>{1.0, 2.0}), DomainError);
}

TEST(TwoCurvatureToy, CurvatureAndConditionNumber) {
  const auto toy = make_two_curvature_toy(1000.0, 1.0, 1.0);
  EXPECT_EQ(toy.curvature_at(0.5), 1000.0);
  EXPECT_EQ(toy.curvature_at(-0.5), 1000.0);
  EXPECT_EQ(toy.curvature_at(2.0), 1.0);
  EXPECT_EQ(toy.curvature_at(1.0), 1000.0);  // ties go inside
  EXPECT_EQ(toy.curvature_at(-1.0), 1000.0);
  EXPECT_EQ(toy.condition_number(), 1000.0);
  EXPECT_EQ(make_two_curvature_toy(1.0, 1.0, 3.0).condition_number(), 1.0);
  EXPECT_THROW(make_two_curvature_toy(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(make_two_curvature_toy(1.0, 1.0, 0.0), DomainError);
}

TEST(TwoCurvatureToy, LossIsContinuousAndMatchesTheGradient) {
  const auto toy = make_two_curvature_toy(1000.0, 1.0, 1.0);
  const double below = *toy.loss(std::vector<double>{std::nextafter(1.0, 0.0)});
  const double above = *toy.loss(std::vector<double>{std::nextafter(1.0, 2.0)});
  EXPECT_NEAR(below, above, 1e-9);
  // Central differences away from the breakpoint.
  for (const double x : {-3.0, -0.4, 0.3, 2.5}) {
    const double h = 1e-6;
    const double fd = (*toy.loss(std::vector<double>{x + h}) - *toy.loss(std::vector<double>{x - h})) /
                      (2 * h);
    EXPECT_NEAR(fd, toy.full_gradient(std::vector<double>{x})[0], 1e-5 * std::abs(fd) + 1e-6);
  }
}

TEST(GeneralizedCurvature, Examples) {
  const auto q = make_noisy_quadratic({7.0}, {});
  EXPECT_DOUBLE_EQ(generalized_curvature(q, std::vector<double>{3.0}), 7.0);
  const auto toy = make_two_curvature_toy(1000.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(generalized_curvature(toy, std::vector<double>{0.5}), 1000.0);
  EXPECT_DOUBLE_EQ(generalized_curvature(toy, std::vector<double>{2.0}), 1.0);
  EXPECT_THROW(generalized_curvature(toy, std::vector<double>{0.0}), DomainError);
  const auto q2 = make_noisy_quadratic({2.0, 5.0}, {});
  EXPECT_DOUBLE_EQ(generalized_curvature(q2, std::vector<double>{1.0, 4.0}, 1), 5.0);
}

TEST(TwoCurvatureToy, NoiseIsZeroMean) {
  const PiecewiseCurvatureObjective toy(1000.0, 1.0, 1.0, 0.5);
  Rng rng(9);
  const std::vector<double> x{2.0};
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += toy.sample_gradient(x, rng)[0];
  EXPECT_NEAR(sum / n, 2.0, 4.0 * 0.5 / std::sqrt(n));
}

}  // namespace
}  // namespace yellowfin
