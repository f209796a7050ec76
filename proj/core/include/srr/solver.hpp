#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace srr {

// Singular-value / pivot floor relative to the largest scale of the matrix.
inline constexpr double kSingularityFloor = 1e-14;

// Phi x = mu with Phi = [1 | -Sigma] and x = [nu, sigma_pi_1, ..., sigma_pi_{N-1}].
struct PhiSystem {
  Eigen::MatrixXd phi;
  Eigen::VectorXd mu;

  Eigen::Index size() const { return phi.rows(); }
};

struct SvdFactors {
  Eigen::MatrixXd u;
  Eigen::VectorXd d;  // non-increasing, non-negative
  Eigen::MatrixXd v;
};

// Drift and volatility of the state-price deflator recovered from one system.
struct DeflatorSolution {
  double nu = 0.0;                 // shadow riskless rate, -mu_pi
  Eigen::VectorXd sigma_pi_vec;    // sigma_pi_k, k = 1..N-1
  double sigma_pi_total = 0.0;     // Euclidean norm of sigma_pi_vec
  double residual_norm = 0.0;      // ||Phi x - mu||_2 against the original Phi
  double kappa = 0.0;              // condition number used for this solve
};

PhiSystem build_phi(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu);

SvdFactors svd(const Eigen::MatrixXd& phi);

// LU factorization with partial (row) pivoting, P A = L U.
class PivotedLu {
 public:
  // Throws SingularMatrixError when a pivot falls to or below
  // kSingularityFloor * max|a|.
  explicit PivotedLu(const Eigen::MatrixXd& a);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  double determinant() const;

 private:
  Eigen::MatrixXd lu_;
  std::vector<Eigen::Index> perm_;
  int sign_ = 1;
};

// Unregularized solve by pivoted LU. kappa is taken from `known_kappa` when
// given (callers that already hold the singular values), otherwise computed.
DeflatorSolution solve_lu(const PhiSystem& sys, std::optional<double> known_kappa = {});

// x = V diag(d)^-1 U^T mu. A supplied d_override replaces the singular
// values (the regularized route); residuals still use the original Phi.
DeflatorSolution solve_svd(const PhiSystem& sys,
                           const std::optional<Eigen::VectorXd>& d_override = {});
DeflatorSolution solve_svd(const PhiSystem& sys, const SvdFactors& factors,
                           const std::optional<Eigen::VectorXd>& d_override = {});

// 2-norm condition number d_1 / d_N; +infinity when d_N <= kSingularityFloor * d_1.
double condition_number(const Eigen::MatrixXd& phi);
double condition_number_from_singular_values(const Eigen::VectorXd& d);

struct TwoAssetSolution {
  double nu = 0.0;
  double sigma_pi = 0.0;
};

// Closed form for two assets driven by one Brownian motion.
TwoAssetSolution srr_two_asset(double mu1, double mu2, double s1, double s2);

// Largest disagreement among (mu1 - nu)/s1, -sigma_pi and (mu2 - nu)/s2.
double market_price_of_risk_gap(double mu1, double mu2, double s1, double s2,
                                const TwoAssetSolution& sol);

double total_volatility(std::span<const double> sigma_pi_vec);
double total_volatility(const Eigen::VectorXd& sigma_pi_vec);

// nu = det[mu | -Sigma] / det Phi. Test oracle only; the LU route is the
// production path.
double solve_determinant(const PhiSystem& sys);

// Per-asset martingale residuals mu_j + mu_pi + sum_k sigma_jk sigma_pi_k.
Eigen::VectorXd deflator_residuals(const PhiSystem& sys, const DeflatorSolution& sol);

}  // namespace srr
