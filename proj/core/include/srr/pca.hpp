#pragma once

#include <Eigen/Dense>

namespace srr {

// Divisor applied to X^T X when forming the sample covariance.
enum class VarianceDivisor {
  kSampleMinusOne,  // M - 1
  kPopulation,      // M
};

double divisor_value(VarianceDivisor divisor, Eigen::Index rows);

struct CenteredPanel {
  Eigen::MatrixXd values;     // every column has zero mean
  Eigen::VectorXd means;      // subtracted column means
};

CenteredPanel center_columns(const Eigen::MatrixXd& x);

// Principal component analysis of a centered M x N panel.
//
// eigenvalues are sorted non-increasing and clipped at 0; column j of
// eigenvectors is w_j, normalised and sign-fixed so that its largest-magnitude
// entry is positive (first such index on ties). components = X W, so column j
// is the j-th principal component with sample variance eigenvalues[j].
struct PcaResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::MatrixXd components;
  Eigen::VectorXd column_means;
};

// x0 must already be centered; column_means of the result are zero.
PcaResult pca(const Eigen::MatrixXd& x0,
              VarianceDivisor divisor = VarianceDivisor::kSampleMinusOne);

// Same analysis, carrying the means recorded by center_columns.
PcaResult pca(const CenteredPanel& panel,
              VarianceDivisor divisor = VarianceDivisor::kSampleMinusOne);

// Flips columns in place to the sign convention described above.
void apply_sign_convention(Eigen::MatrixXd& vectors);

}  // namespace srr
