#include "srr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "srr/error.hpp"

namespace srr {

namespace {

void check_system(const PhiSystem& sys) {
  if (sys.phi.rows() != sys.phi.cols()) throw InvalidArgument("Phi must be square");
  if (sys.mu.size() != sys.phi.rows()) throw InvalidArgument("mu length must match Phi");
  if (sys.phi.rows() < 1) throw InvalidArgument("empty system");
}

DeflatorSolution make_solution(const PhiSystem& sys, const Eigen::VectorXd& x, double kappa) {
  DeflatorSolution sol;
  sol.nu = x(0);
  sol.sigma_pi_vec = x.tail(x.size() - 1);
  sol.sigma_pi_total = total_volatility(sol.sigma_pi_vec);
  sol.residual_norm = (sys.phi * x - sys.mu).norm();
  sol.kappa = kappa;
  return sol;
}

}  // namespace

PhiSystem build_phi(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu) {
  const Eigen::Index n = mu.size();
  if (n < 1) throw InvalidArgument("build_phi: empty mu");
  if (sigma.rows() != n || sigma.cols() != n - 1) {
    throw InvalidArgument("build_phi: Sigma must be " + std::to_string(n) + " x " +
                          std::to_string(n - 1) + ", got " + std::to_string(sigma.rows()) +
                          " x " + std::to_string(sigma.cols()));
  }
  PhiSystem sys;
  sys.phi.resize(n, n);
  sys.phi.col(0).setOnes();
  sys.phi.rightCols(n - 1) = -sigma;
  sys.mu = mu;
  return sys;
}

SvdFactors svd(const Eigen::MatrixXd& phi) {
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(phi, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

PivotedLu::PivotedLu(const Eigen::MatrixXd& a) : lu_(a), perm_(static_cast<std::size_t>(a.rows())) {
  if (a.rows() != a.cols()) throw InvalidArgument("LU needs a square matrix");
  const Eigen::Index n = a.rows();
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
  const double floor = kSingularityFloor * a.cwiseAbs().maxCoeff();

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    double best = std::abs(lu_(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        pivot = i;
      }
    }
    if (!(best > floor)) {
      throw SingularMatrixError("singular matrix: pivot " + std::to_string(k) +
                                    " magnitude " + std::to_string(best) +
                                    " at or below floor",
                                static_cast<std::size_t>(k));
    }
    if (pivot != k) {
      lu_.row(k).swap(lu_.row(pivot));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(pivot)]);
      sign_ = -sign_;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = lu_(i, k) / lu_(k, k);
      lu_(i, k) = factor;
      for (Eigen::Index j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
    }
  }
}

Eigen::VectorXd PivotedLu::solve(const Eigen::VectorXd& b) const {
  const Eigen::Index n = lu_.rows();
  if (b.size() != n) throw InvalidArgument("LU solve: right-hand side has wrong length");
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = b(perm_[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < i; ++j) s -= lu_(i, j) * y(j);
    y(i) = s;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= lu_(i, j) * y(j);
    y(i) = s / lu_(i, i);
  }
  return y;
}

double PivotedLu::determinant() const {
  double det = sign_;
  for (Eigen::Index i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

DeflatorSolution solve_lu(const PhiSystem& sys, std::optional<double> known_kappa) {
  check_system(sys);
  const PivotedLu lu(sys.phi);
  const double kappa = known_kappa ? *known_kappa : condition_number(sys.phi);
  return make_solution(sys, lu.solve(sys.mu), kappa);
}

DeflatorSolution solve_svd(const PhiSystem& sys, const std::optional<Eigen::VectorXd>& d_override) {
  check_system(sys);
  return solve_svd(sys, svd(sys.phi), d_override);
}

DeflatorSolution solve_svd(const PhiSystem& sys, const SvdFactors& factors,
                           const std::optional<Eigen::VectorXd>& d_override) {
  check_system(sys);
  const Eigen::VectorXd& d = d_override ? *d_override : factors.d;
  if (d.size() != sys.size()) throw InvalidArgument("singular value vector has wrong length");

  Eigen::Index smallest = 0;
  const double d_min = d.minCoeff(&smallest);
  const double d_max = d.maxCoeff();
  if (!(d_min > kSingularityFloor * d_max)) {
    throw SingularMatrixError("singular matrix: smallest singular value below floor",
                              static_cast<std::size_t>(smallest));
  }
  const Eigen::VectorXd y = factors.u.transpose() * sys.mu;
  const Eigen::VectorXd z = y.cwiseQuotient(d);
  const Eigen::VectorXd x = factors.v * z;
  return make_solution(sys, x, d_max / d_min);
}

double condition_number_from_singular_values(const Eigen::VectorXd& d) {
  if (d.size() == 0) return std::numeric_limits<double>::infinity();
  const double d_max = d.maxCoeff();
  const double d_min = d.minCoeff();
  if (!(d_max > 0.0) || !(d_min > kSingularityFloor * d_max)) {
    return std::numeric_limits<double>::infinity();
  }
  return d_max / d_min;
}

double condition_number(const Eigen::MatrixXd& phi) {
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(phi);
  return condition_number_from_singular_values(solver.singularValues());
}

TwoAssetSolution srr_two_asset(double mu1, double mu2, double s1, double s2) {
  if (s1 == s2) {
    throw InvalidArgument("srr_two_asset: equal volatilities (incomplete market)");
  }
  const double ds = s2 - s1;
  return {(mu1 * s2 - mu2 * s1) / ds, (mu1 - mu2) / ds};
}

double market_price_of_risk_gap(double mu1, double mu2, double s1, double s2,
                                const TwoAssetSolution& sol) {
  const double a = (mu1 - sol.nu) / s1;
  const double b = -sol.sigma_pi;
  const double c = (mu2 - sol.nu) / s2;
  return std::max({std::abs(a - b), std::abs(c - b), std::abs(a - c)});
}

double total_volatility(std::span<const double> sigma_pi_vec) {
  double sum = 0.0;
  for (double s : sigma_pi_vec) sum += s * s;
  return std::sqrt(sum);
}

double total_volatility(const Eigen::VectorXd& sigma_pi_vec) {
  return total_volatility(std::span<const double>(sigma_pi_vec.data(),
                                                  static_cast<std::size_t>(sigma_pi_vec.size())));
}

double solve_determinant(const PhiSystem& sys) {
  check_system(sys);
  const double det_phi = Eigen::FullPivLU<Eigen::MatrixXd>(sys.phi).determinant();
  double hadamard = 1.0;
  for (Eigen::Index j = 0; j < sys.phi.cols(); ++j) hadamard *= sys.phi.col(j).norm();
  if (!(std::abs(det_phi) > kSingularityFloor * hadamard)) {
    throw SingularMatrixError("solve_determinant: det Phi is zero", 0);
  }
  Eigen::MatrixXd phi_mu = sys.phi;
  phi_mu.col(0) = sys.mu;
  return Eigen::FullPivLU<Eigen::MatrixXd>(phi_mu).determinant() / det_phi;
}

Eigen::VectorXd deflator_residuals(const PhiSystem& sys, const DeflatorSolution& sol) {
  // Phi = [1 | -Sigma], so Sigma sigma_pi = -(Phi without its first column) sigma_pi.
  const Eigen::Index n = sys.size();
  const Eigen::MatrixXd sigma = -sys.phi.rightCols(n - 1);
  const double mu_pi = -sol.nu;
  return (sys.mu.array() + mu_pi).matrix() + sigma * sol.sigma_pi_vec;
}

}  // namespace srr
