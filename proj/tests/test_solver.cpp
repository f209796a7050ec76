#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "srr/error.hpp"
#include "srr/solver.hpp"
#include "test_support.hpp"

namespace srr {
namespace {

using testing::random_matrix;
using testing::random_vector;

PhiSystem two_asset_system() {
  return build_phi(Eigen::Vector2d(0.1, 0.3), Eigen::Vector2d(0.01, 0.02));
}

TEST(BuildPhi, Layout) {
  Eigen::MatrixXd s(2, 1);
  s << 0.01, 0.02;
  const auto sys = build_phi(s, Eigen::Vector2d(0.0045, 0.004));
  Eigen::Matrix2d expected;
  expected << 1, -0.01, 1, -0.02;
  EXPECT_EQ(sys.phi, expected);

  Eigen::MatrixXd s3(3, 2);
  s3 << 1, 2, 3, 4, 5, 6;
  Eigen::Matrix3d e3;
  e3 << 1, -1, -2, 1, -3, -4, 1, -5, -6;
  EXPECT_EQ(build_phi(s3, Eigen::Vector3d::Zero()).phi, e3);
}

TEST(BuildPhi, ShapeMismatchRejected) {
  EXPECT_THROW(build_phi(Eigen::MatrixXd::Zero(3, 3), Eigen::Vector3d::Zero()), InvalidArgument);
  EXPECT_THROW(build_phi(Eigen::MatrixXd::Zero(3, 2), Eigen::Vector2d::Zero()), InvalidArgument);
}

TEST(SolveLu, TwoAssetExample) {
  const auto sol = solve_lu(two_asset_system());
  EXPECT_NEAR(sol.nu, 0.005, 1e-15);
  ASSERT_EQ(sol.sigma_pi_vec.size(), 1);
  EXPECT_NEAR(sol.sigma_pi_vec(0), -0.05, 1e-15);
  EXPECT_NEAR(sol.sigma_pi_total, 0.05, 1e-15);
}

TEST(SolveLu, ZeroDriftGivesZero) {
  std::mt19937_64 rng(1);
  const auto sys = build_phi(random_matrix(4, 3, rng, 0.01), Eigen::VectorXd::Zero(4));
  const auto sol = solve_lu(sys);
  EXPECT_EQ(sol.nu, 0.0);
  EXPECT_EQ(sol.sigma_pi_vec, Eigen::VectorXd::Zero(3));
}

TEST(SolveLu, RepeatedRowIsSingular) {
  Eigen::MatrixXd s(3, 2);
  s << 0.01, 0.02, 0.01, 0.02, 0.03, -0.01;
  const auto sys = build_phi(s, Eigen::Vector3d(1e-3, 2e-3, 3e-3));
  try {
    solve_lu(sys);
    FAIL();
  } catch (const SingularMatrixError& e) {
    EXPECT_GE(e.pivot_index(), 0);
    EXPECT_LT(e.pivot_index(), 3);
  }
}

TEST(SolveSvd, AgreesWithLu) {
  std::mt19937_64 rng(2);
  const auto sys = build_phi(random_matrix(5, 4, rng, 0.01), random_vector(5, rng, 1e-3));
  const auto a = solve_lu(sys);
  const auto b = solve_svd(sys);
  EXPECT_NEAR(a.nu, b.nu, 1e-12 * std::abs(a.nu) + 1e-16);
  EXPECT_LE((a.sigma_pi_vec - b.sigma_pi_vec).norm(), 1e-10 * a.sigma_pi_vec.norm());
}

TEST(SolveSvd, IdentityOverrideIsAPlainSolve) {
  const auto sys = two_asset_system();
  const auto f = svd(sys.phi);
  EXPECT_EQ(solve_svd(sys, f, f.d).nu, solve_svd(sys, f).nu);
}

TEST(SolveSvd, LargerSmallestSingularValueShrinksSolution) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sys = build_phi(random_matrix(4, 3, rng, 0.01), random_vector(4, rng, 1e-3));
    const auto f = svd(sys.phi);
    Eigen::VectorXd d = f.d;
    d(3) *= 2.0;
    const auto plain = solve_svd(sys, f);
    const auto reg = solve_svd(sys, f, d);
    Eigen::VectorXd xp(4), xr(4);
    xp << plain.nu, plain.sigma_pi_vec;
    xr << reg.nu, reg.sigma_pi_vec;
    EXPECT_LE(xr.norm(), xp.norm() * (1 + 1e-14));
  }
}

TEST(ConditionNumber, Examples) {
  EXPECT_DOUBLE_EQ(condition_number(Eigen::Matrix3d::Identity()), 1.0);
  EXPECT_NEAR(condition_number(Eigen::Vector2d(10, 0.1).asDiagonal().toDenseMatrix()), 100.0, 1e-12);
  Eigen::Matrix3d rep;
  rep << 1, 1, 2, 3, 3, 4, 5, 5, 6;
  EXPECT_EQ(condition_number(rep), std::numeric_limits<double>::infinity());
}

TEST(SrrTwoAsset, Example) {
  const auto sol = srr_two_asset(0.01, 0.02, 0.1, 0.3);
  EXPECT_NEAR(sol.nu, 0.005, 1e-15);
  EXPECT_NEAR(sol.sigma_pi, -0.05, 1e-15);
  EXPECT_LE(market_price_of_risk_gap(0.01, 0.02, 0.1, 0.3, sol), 1e-15);
}

TEST(SrrTwoAsset, EqualVolatilitiesRejected) {
  EXPECT_THROW(srr_two_asset(0.001, 0.002, 0.01, 0.01), InvalidArgument);
}

TEST(SrrTwoAsset, MatchesGeneralSolver) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> mu(-1e-3, 1e-3), s(0.005, 0.03);
  for (int i = 0; i < 1000; ++i) {
    const double m1 = mu(rng), m2 = mu(rng), s1 = s(rng), s2 = s(rng);
    if (std::abs(s1 - s2) < 1e-3) continue;
    const auto closed = srr_two_asset(m1, m2, s1, s2);
    const auto lu = solve_lu(build_phi(Eigen::Vector2d(s1, s2), Eigen::Vector2d(m1, m2)));
    EXPECT_NEAR(closed.nu, lu.nu, 1e-12 * (std::abs(lu.nu) + 1e-3));
    EXPECT_NEAR(closed.sigma_pi, lu.sigma_pi_vec(0), 1e-10 * std::abs(lu.sigma_pi_vec(0)) + 1e-14);
    EXPECT_LE(market_price_of_risk_gap(m1, m2, s1, s2, closed),
              1e-10 * std::abs(closed.sigma_pi) + 1e-12);
  }
}

TEST(TotalVolatility, Examples) {
  const std::vector<double> v{3.0, 4.0};
  EXPECT_DOUBLE_EQ(total_volatility(v), 5.0);
  EXPECT_DOUBLE_EQ(total_volatility(Eigen::VectorXd::Zero(3)), 0.0);
  EXPECT_DOUBLE_EQ(total_volatility(Eigen::VectorXd::Constant(1, -2.0)), 2.0);
}

TEST(SolveDeterminant, Example) {
  EXPECT_NEAR(solve_determinant(two_asset_system()), 0.005, 1e-15);
  Eigen::MatrixXd s3(3, 2);
  s3 << 0.01, 0.02, 0.01, 0.02, 0.03, 0.0;
  EXPECT_THROW(solve_determinant(build_phi(s3, Eigen::Vector3d(1e-3, 2e-3, 3e-3))),
               SingularMatrixError);
}

class RouteAgreement : public ::testing::TestWithParam<int> {};

// Random well-conditioned systems: LU, SVD and Cramer must agree on nu, and
// the solution must satisfy the martingale restrictions.
TEST_P(RouteAgreement, ThreeRoutes) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(100 + GetParam()));
  const Eigen::Index n = 2 + GetParam() % 7;
  int checked = 0;
  while (checked < 20) {
    const auto sys = build_phi(random_matrix(n, n - 1, rng, 0.01), random_vector(n, rng, 1e-3));
    const double kappa = condition_number(sys.phi);
    if (!(kappa <= 1e4)) continue;
    ++checked;
    const auto lu = solve_lu(sys);
    const auto sv = solve_svd(sys);
    const double det = solve_determinant(sys);
    const double scale = std::abs(lu.nu) + 1e-6;
    EXPECT_LE(std::abs(lu.nu - sv.nu), 1e-10 * scale);
    EXPECT_LE(std::abs(lu.nu - det), 1e-10 * scale);
    EXPECT_LE(lu.residual_norm, 1e-12 * kappa * sys.mu.norm() + 1e-18);
    EXPECT_LE(deflator_residuals(sys, lu).cwiseAbs().maxCoeff(), 1e-12 * kappa * 1e-3 + 1e-18);
    EXPECT_NEAR(lu.kappa, kappa, 1e-8 * kappa);

    // Flipping the sign of one factor flips sigma_pi_k only.
    Eigen::MatrixXd flipped_sigma = -sys.phi.rightCols(n - 1);
    flipped_sigma.col(0) *= -1.0;
    const auto flipped = solve_lu(build_phi(flipped_sigma, sys.mu));
    EXPECT_NEAR(flipped.nu, lu.nu, 1e-12 * scale);
    EXPECT_NEAR(flipped.sigma_pi_vec(0), -lu.sigma_pi_vec(0),
                1e-10 * lu.sigma_pi_vec.norm());
    EXPECT_NEAR(flipped.sigma_pi_total, lu.sigma_pi_total, 1e-10 * lu.sigma_pi_total);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, RouteAgreement, ::testing::Range(0, 14));

TEST(Solver, ExcessReturnIsMinusLoadingTimesSigmaPi) {
  // mu_j - nu = -sigma_j . sigma_pi, so assets loading against sigma_pi earn
  // a positive premium over nu.
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Eigen::MatrixXd s = random_matrix(4, 3, rng, 0.01);
    const auto sys = build_phi(s, random_vector(4, rng, 1e-3));
    if (!(condition_number(sys.phi) <= 1e4)) continue;
    const auto sol = solve_lu(sys);
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double premium = -s.row(j).dot(sol.sigma_pi_vec);
      EXPECT_NEAR(sys.mu(j) - sol.nu, premium, 1e-14);
    }
  }
}

TEST(PivotedLu, DeterminantMatchesReference) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd a = random_matrix(6, 6, rng);
    const PivotedLu lu(a);
    EXPECT_NEAR(lu.determinant(), a.determinant(), 1e-10 * std::abs(a.determinant()));
    const Eigen::VectorXd b = random_vector(6, rng);
    EXPECT_LE((a * lu.solve(b) - b).norm(), 1e-10 * b.norm() * a.norm() * a.inverse().norm());
  }
}

}  // namespace
}  // namespace srr
