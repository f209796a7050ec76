#include "srr/pca.hpp"

#include <cmath>

#include "srr/error.hpp"

namespace srr {

double divisor_value(VarianceDivisor divisor, Eigen::Index rows) {
  return divisor == VarianceDivisor::kSampleMinusOne ? static_cast<double>(rows - 1)
                                                     : static_cast<double>(rows);
}

CenteredPanel center_columns(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InvalidArgument("center_columns needs at least 2 rows");
  CenteredPanel out;
  out.means = x.colwise().mean().transpose();
  out.values = x.rowwise() - out.means.transpose();
  return out;
}

void apply_sign_convention(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

PcaResult pca(const Eigen::MatrixXd& x0, VarianceDivisor divisor) {
  if (x0.rows() < 2) throw InvalidArgument("pca needs at least 2 rows");
  if (x0.cols() < 1) throw InvalidArgument("pca needs at least 1 column");
  if (!x0.allFinite()) throw InvalidArgument("pca input contains non-finite values");

  const Eigen::Index n = x0.cols();
  const Eigen::MatrixXd cov =
      (x0.transpose() * x0) / divisor_value(divisor, x0.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed");

  // Eigen returns ascending order; reverse into descending.
  PcaResult out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (out.eigenvalues(j) < 0.0) out.eigenvalues(j) = 0.0;
  }
  apply_sign_convention(out.eigenvectors);
  out.components = x0 * out.eigenvectors;
  out.column_means = Eigen::VectorXd::Zero(n);
  return out;
}

PcaResult pca(const CenteredPanel& panel, VarianceDivisor divisor) {
  PcaResult out = pca(panel.values, divisor);
  out.column_means = panel.means;
  return out;
}

}  // namespace srr
