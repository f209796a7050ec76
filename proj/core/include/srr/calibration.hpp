#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "srr/date.hpp"
#include "srr/market_data.hpp"
#include "srr/pca.hpp"

namespace srr {

enum class CalibrationMethod {
  kDirect,      // sigma_jk = sqrt(lambda_k) w_jk
  kRegression,  // OLS on standardized principal components
};

std::string_view to_string(CalibrationMethod method);
CalibrationMethod parse_calibration_method(std::string_view text);

struct CalibrationOptions {
  CalibrationMethod method = CalibrationMethod::kDirect;
  VarianceDivisor pca_divisor = VarianceDivisor::kSampleMinusOne;
  // Divisor for Var[P_k] when standardizing regressors.
  VarianceDivisor regression_divisor = VarianceDivisor::kSampleMinusOne;
};

// Drift and N x (N-1) volatility loadings for one estimation window, in
// per-day units.
struct CalibratedModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  CalibrationMethod method = CalibrationMethod::kDirect;
  Date window_end_date{};
};

// Eigen-scaling estimate from the leading N-1 principal axes; the last axis
// is dropped.
Eigen::MatrixXd sigma_direct(const PcaResult& p);

// Regresses each demeaned return column on the first N-1 standardized
// principal components (no intercept). `returns` is the raw M x N window;
// `p` must be the PCA of its centered version.
Eigen::MatrixXd sigma_regression(const Eigen::MatrixXd& returns, const PcaResult& p,
                                 VarianceDivisor divisor = VarianceDivisor::kSampleMinusOne);

// Requires M > N.
CalibratedModel calibrate(const ReturnMatrix& r, const CalibrationOptions& options = {});

}  // namespace srr
