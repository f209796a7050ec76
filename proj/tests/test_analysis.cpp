#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "srr/analysis.hpp"
#include "srr/error.hpp"
#include "test_support.hpp"

namespace srr {
namespace {

using testing::random_matrix;

PcaResult diagonal_pca(const Eigen::VectorXd& lambda) {
  PcaResult p;
  p.eigenvalues = lambda;
  p.eigenvectors = Eigen::MatrixXd::Identity(lambda.size(), lambda.size());
  p.column_means = Eigen::VectorXd::Zero(lambda.size());
  return p;
}

MinRateOptions tight(std::size_t k0 = 2) {
  MinRateOptions o;
  o.k0 = k0;
  o.tol_sigma = 1e-9;
  o.tol_r = 1e-9;
  return o;
}

TEST(Quantiles, OneToFive) {
  const std::vector<double> x{5, 3, 1, 4, 2};
  const auto q = quantiles(x);
  EXPECT_EQ(q.p25, 2.0);
  EXPECT_EQ(q.p50, 3.0);
  EXPECT_EQ(q.p75, 4.0);
  EXPECT_EQ(q.min, 1.0);
  EXPECT_EQ(q.max, 5.0);
  EXPECT_EQ(q.mean, 3.0);
  EXPECT_EQ(q.count, 5u);
}

TEST(Quantiles, Interpolates) {
  const std::vector<double> sorted{0, 10};
  EXPECT_DOUBLE_EQ(quantile(sorted, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(quantile(sorted, 1.0), 10.0);
}

TEST(Quantiles, Singleton) {
  const auto q = quantiles(std::vector<double>{7.5});
  EXPECT_EQ(q.p25, 7.5);
  EXPECT_EQ(q.p50, 7.5);
  EXPECT_EQ(q.p75, 7.5);
}

TEST(Quantiles, EmptyAndAllMissingRejected) {
  EXPECT_THROW(quantiles(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(quantiles(std::vector<std::optional<double>>{std::nullopt}), InvalidArgument);
}

TEST(Quantiles, MissingValuesDropped) {
  const std::vector<std::optional<double>> x{1.0, std::nullopt, 3.0};
  const auto q = quantiles(x);
  EXPECT_EQ(q.count, 2u);
  EXPECT_EQ(q.p50, 2.0);
}

TEST(Quantiles, PermutationInvariantAndMonotone) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + rng() % 50);
    for (auto& v : x) v = z(rng);
    auto y = x;
    std::shuffle(y.begin(), y.end(), rng);
    const auto a = quantiles(x), b = quantiles(y);
    EXPECT_EQ(a.p25, b.p25);
    EXPECT_EQ(a.p50, b.p50);
    EXPECT_EQ(a.p75, b.p75);
    EXPECT_LE(a.min, a.p25);
    EXPECT_LE(a.p25, a.p50);
    EXPECT_LE(a.p50, a.p75);
    EXPECT_LE(a.p75, a.max);
    // Pointwise domination carries over to every quantile.
    auto shifted = x;
    for (auto& v : shifted) v += std::abs(z(rng));
    const auto c = quantiles(shifted);
    EXPECT_LE(a.p25, c.p25);
    EXPECT_LE(a.p50, c.p50);
    EXPECT_LE(a.p75, c.p75);
  }
}

TEST(MinRate, TwoCompositeClosedForm) {
  const auto res = min_rate(diagonal_pca(Eigen::Vector3d(4, 1, 0)), Eigen::Vector3d::Zero(), tight());
  EXPECT_EQ(res.reason, MinRateStop::kZeroEigenvalue);
  EXPECT_EQ(res.j_star, 2u);
  ASSERT_EQ(res.weights.size(), 2);
  EXPECT_NEAR(res.weights(0), 0.2, 1e-15);
  EXPECT_NEAR(res.weights(1), 0.8, 1e-15);
  EXPECT_NEAR(res.sigma_r, std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(res.sigma_r, 0.8944, 1e-4);
}

TEST(MinRate, EqualEigenvaluesRunToTheEnd) {
  const double lambda = 2.0;
  const auto res = min_rate(diagonal_pca(Eigen::VectorXd::Constant(6, lambda)),
                            Eigen::VectorXd::Constant(6, 1e-3), tight());
  EXPECT_EQ(res.reason, MinRateStop::kExhausted);
  EXPECT_EQ(res.j_star, 6u);
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_NEAR(res.weights(i), 1.0 / 6.0, 1e-15);
  for (const auto& step : res.history) {
    EXPECT_NEAR(step.sigma, std::sqrt(lambda / static_cast<double>(step.j)), 1e-15);
    EXPECT_NEAR(step.r, 1e-3, 1e-18);
  }
}

TEST(MinRate, LargeTolerancesStopAtZeroEigenvalue) {
  MinRateOptions o;
  o.tol_sigma = 1e6;
  o.tol_r = 1e6;
  const auto res = min_rate(diagonal_pca((Eigen::VectorXd(5) << 5, 4, 3, 2, 0).finished()),
                            Eigen::VectorXd::Zero(5), o);
  EXPECT_EQ(res.j_star, 4u);
  EXPECT_EQ(res.reason, MinRateStop::kZeroEigenvalue);
}

TEST(MinRate, PreconditionsEnforced) {
  const auto p = diagonal_pca(Eigen::Vector3d(4, 1, 0.5));
  EXPECT_THROW(min_rate(p, Eigen::Vector3d::Zero(), tight(3)), InvalidArgument);
  EXPECT_THROW(min_rate(p, Eigen::Vector3d::Zero(), tight(1)), InvalidArgument);
  const auto zero = diagonal_pca(Eigen::Vector3d(4, 0, 0));
  EXPECT_THROW(min_rate(zero, Eigen::Vector3d::Zero(), tight(2)), InvalidArgument);
  MinRateOptions bad = tight();
  bad.tol_r = 0.0;
  EXPECT_THROW(min_rate(p, Eigen::Vector3d::Zero(), bad), InvalidArgument);
}

TEST(MinRate, BreachReturnsBreachingOrPreviousPortfolio) {
  // Composite 4 has a much larger mean, so adding it raises r.
  const auto p = diagonal_pca((Eigen::VectorXd(5) << 5, 4, 3, 2, 1).finished());
  const Eigen::VectorXd means = (Eigen::VectorXd(5) << 0, 0, 0, 1, 0).finished();
  auto o = tight();
  const auto breaching = min_rate(p, means, o);
  EXPECT_EQ(breaching.reason, MinRateStop::kToleranceBreached);
  EXPECT_EQ(breaching.j_star, 4u);
  EXPECT_GT(breaching.r, 0.0);
  o.stop = StopRule::kReturnPrevious;
  const auto previous = min_rate(p, means, o);
  EXPECT_EQ(previous.j_star, 3u);
  EXPECT_EQ(previous.r, 0.0);
  EXPECT_EQ(previous.history.size(), breaching.history.size());
}

TEST(MinRate, KktAndMonotoneSigma) {
  std::mt19937_64 rng(11);
  const auto p = pca(center_columns(random_matrix(200, 8, rng) * random_matrix(8, 8, rng)));
  const Eigen::VectorXd means = testing::random_vector(8, rng, 1e-3);
  MinRateOptions o;
  o.tol_sigma = 1e-9;
  o.tol_r = 1.0;
  const auto res = min_rate(p, means, o);
  // lambda_i q_i is the same for every composite in the portfolio.
  for (Eigen::Index i = 0; i < res.weights.size(); ++i) {
    EXPECT_NEAR(p.eigenvalues(i) * res.weights(i), p.eigenvalues(0) * res.weights(0),
                1e-12 * p.eigenvalues(0));
  }
  EXPECT_NEAR(res.weights.sum(), 1.0, 1e-15);
  for (std::size_t s = 1; s < res.history.size(); ++s) {
    EXPECT_LE(res.history[s].sigma, res.history[s - 1].sigma);
  }
}

TEST(MinRate, CompositeMeansUseOriginalAssetMeans) {
  Eigen::Matrix2d w;
  w << 0.6, -0.8, 0.8, 0.6;
  PcaResult q = diagonal_pca(Eigen::Vector3d(4, 1, 0));
  q.eigenvectors.topLeftCorner(2, 2) = w;
  const Eigen::Vector3d means(0.01, 0.02, 0.0);
  const auto res = min_rate(q, means, tight());
  const double m1 = 0.6 * 0.01 + 0.8 * 0.02;
  const double m2 = -0.8 * 0.01 + 0.6 * 0.02;
  EXPECT_NEAR(res.r, 0.2 * m1 + 0.8 * m2, 1e-16);
}

TEST(ProjectToSimplex, Properties) {
  EXPECT_EQ(project_to_simplex(Eigen::Vector3d(0.2, 0.3, 0.5)), Eigen::Vector3d(0.2, 0.3, 0.5));
  EXPECT_EQ(project_to_simplex(Eigen::Vector2d(5, -5)), Eigen::Vector2d(1, 0));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd v = testing::random_vector(7, rng);
    const Eigen::VectorXd q = project_to_simplex(v);
    EXPECT_NEAR(q.sum(), 1.0, 1e-14);
    EXPECT_GE(q.minCoeff(), 0.0);
    // Projection is idempotent.
    EXPECT_LE((project_to_simplex(q) - q).norm(), 1e-14);
  }
}

TEST(CompareFullUniverse, DiagonalClosedForm) {
  const Eigen::Matrix2d cov = Eigen::Vector2d(4, 1).asDiagonal();
  MinRateResult composite;
  composite.sigma_r = std::sqrt(0.8);
  const auto res = compare_full_universe(composite, Eigen::Vector2d(0.01, 0.02), cov);
  EXPECT_NEAR(res.weights(0), 0.2, 1e-8);
  EXPECT_NEAR(res.weights(1), 0.8, 1e-8);
  EXPECT_NEAR(res.r_n, 0.2 * 0.01 + 0.8 * 0.02, 1e-10);
  EXPECT_NEAR(res.sigma_ratio, 1.0, 1e-8);
}

TEST(CompareFullUniverse, DominantAssetGetsAllWeight) {
  Eigen::Matrix2d cov;
  cov << 1.0, 1.0, 1.0, 4.0;
  const auto res = compare_full_universe({}, Eigen::Vector2d::Zero(), cov);
  EXPECT_NEAR(res.weights(0), 1.0, 1e-8);
  EXPECT_NEAR(res.sigma_r_n, 1.0, 1e-8);
}

TEST(CompareFullUniverse, NeverWorseThanAnySingleAsset) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXd x = random_matrix(100, 6, rng) * random_matrix(6, 6, rng);
    const Eigen::MatrixXd cov = sample_covariance(x);
    const auto res = compare_full_universe({}, Eigen::VectorXd::Zero(6), cov);
    EXPECT_LE(res.sigma_r_n, std::sqrt(cov.diagonal().minCoeff()) * (1 + 1e-10));
    EXPECT_NEAR(res.weights.sum(), 1.0, 1e-12);
    EXPECT_GE(res.weights.minCoeff(), 0.0);
  }
}

TEST(CompareFullUniverse, IndefiniteRejected) {
  Eigen::Matrix2d cov;
  cov << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(compare_full_universe({}, Eigen::Vector2d::Zero(), cov), InvalidArgument);
}

TEST(SampleCovariance, Divisors) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  EXPECT_DOUBLE_EQ(sample_covariance(x)(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sample_covariance(x, VarianceDivisor::kPopulation)(0, 0), 2.0 / 3.0);
}

}  // namespace
}  // namespace srr
