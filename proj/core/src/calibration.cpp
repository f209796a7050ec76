#include "srr/calibration.hpp"

#include <cmath>
#include <string>

#include "srr/error.hpp"

namespace srr {

namespace {

constexpr double kEigenClipTolerance = 1e-12;
constexpr double kRelativeVarianceFloor = 1e-24;

}  // namespace

std::string_view to_string(CalibrationMethod method) {
  return method == CalibrationMethod::kDirect ? "direct" : "regression";
}

CalibrationMethod parse_calibration_method(std::string_view text) {
  if (text == "direct") return CalibrationMethod::kDirect;
  if (text == "regression") return CalibrationMethod::kRegression;
  throw InvalidArgument("unknown calibration method '" + std::string(text) + "'");
}

Eigen::MatrixXd sigma_direct(const PcaResult& p) {
  const Eigen::Index n = p.eigenvalues.size();
  if (n < 2) throw InvalidArgument("sigma_direct needs at least 2 eigenpairs");
  if (p.eigenvectors.rows() != n || p.eigenvectors.cols() != n) {
    throw InvalidArgument("sigma_direct: eigenvector matrix must be N x N");
  }
  Eigen::MatrixXd sigma(n, n - 1);
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    double lambda = p.eigenvalues(k);
    if (lambda < -kEigenClipTolerance) {
      throw InvalidArgument("sigma_direct: negative eigenvalue " + std::to_string(lambda));
    }
    if (lambda < 0.0) lambda = 0.0;
    sigma.col(k) = std::sqrt(lambda) * p.eigenvectors.col(k);
  }
  return sigma;
}

Eigen::MatrixXd sigma_regression(const Eigen::MatrixXd& returns, const PcaResult& p,
                                 VarianceDivisor divisor) {
  const Eigen::Index m = returns.rows();
  const Eigen::Index n = returns.cols();
  if (n < 2) throw InvalidArgument("sigma_regression needs at least 2 assets");
  if (m < 2) throw InvalidArgument("sigma_regression needs at least 2 rows");
  if (p.components.rows() != m || p.components.cols() != n) {
    throw InvalidArgument("sigma_regression: principal components do not match the panel");
  }

  const Eigen::MatrixXd y = returns.rowwise() - returns.colwise().mean();
  Eigen::MatrixXd regressors = p.components.leftCols(n - 1);
  regressors = regressors.rowwise() - regressors.colwise().mean();

  const double denom = divisor_value(divisor, m);
  Eigen::VectorXd var = regressors.colwise().squaredNorm().transpose() / denom;
  const double var_max = var.maxCoeff();
  if (var_max == 0.0) {
    // Nothing moves in this window: every loading is zero.
    return Eigen::MatrixXd::Zero(n, n - 1);
  }
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (!(var(k) > kRelativeVarianceFloor * var_max)) {
      throw Error("sigma_regression: principal component " + std::to_string(k + 1) +
                  " has zero variance (singular regressors)");
    }
    regressors.col(k) /= std::sqrt(var(k));
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(regressors);
  const Eigen::MatrixXd coeffs = qr.solve(y);  // (N-1) x N
  return coeffs.transpose();
}

CalibratedModel calibrate(const ReturnMatrix& r, const CalibrationOptions& options) {
  const auto m = r.rows();
  const auto n = r.assets();
  if (n < 2) throw InvalidArgument("calibrate needs at least 2 assets");
  if (m <= n) {
    throw InvalidArgument("calibrate needs more rows than assets (M = " + std::to_string(m) +
                          ", N = " + std::to_string(n) + ")");
  }
  if (!r.values.allFinite()) throw DataError("return panel contains non-finite values");

  const CenteredPanel centered = center_columns(r.values);
  const PcaResult p = pca(centered, options.pca_divisor);

  CalibratedModel model;
  model.mu = centered.means;
  model.method = options.method;
  model.sigma = options.method == CalibrationMethod::kDirect
                    ? sigma_direct(p)
                    : sigma_regression(r.values, p, options.regression_divisor);
  if (!r.dates.empty()) model.window_end_date = r.dates.back();
  if (!model.sigma.allFinite() || !model.mu.allFinite()) {
    throw Error("calibration produced non-finite output");
  }
  return model;
}

}  // namespace srr
