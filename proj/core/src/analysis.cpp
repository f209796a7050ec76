#include "srr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srr/error.hpp"

namespace srr {

namespace {

constexpr double kZeroEigenvalueRatio = 1e-12;

struct Portfolio {
  Eigen::VectorXd weights;
  double r = 0.0;
  double sigma = 0.0;
};

Portfolio inverse_variance_portfolio(const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd& means, Eigen::Index j) {
  Portfolio p;
  p.weights = lambda.head(j).cwiseInverse();
  p.weights /= p.weights.sum();
  p.r = p.weights.dot(means.head(j));
  p.sigma = std::sqrt(p.weights.cwiseAbs2().dot(lambda.head(j)));
  return p;
}

}  // namespace

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty series");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

QuantileSummary quantiles(std::span<const double> series) {
  if (series.empty()) throw InvalidArgument("quantiles: empty series");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  QuantileSummary s;
  s.count = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.p25 = quantile(sorted, 0.25);
  s.p50 = quantile(sorted, 0.50);
  s.p75 = quantile(sorted, 0.75);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
  return s;
}

QuantileSummary quantiles(const std::vector<std::optional<double>>& series) {
  std::vector<double> present;
  present.reserve(series.size());
  for (const auto& v : series) {
    if (v) present.push_back(*v);
  }
  return quantiles(present);
}

std::string_view to_string(MinRateStop stop) {
  switch (stop) {
    case MinRateStop::kToleranceBreached: return "tolerance-breached";
    case MinRateStop::kZeroEigenvalue: return "zero-eigenvalue";
    case MinRateStop::kExhausted: return "exhausted";
  }
  return "unknown";
}

MinRateResult min_rate(const PcaResult& p, const Eigen::VectorXd& mean_returns,
                       const MinRateOptions& options) {
  const Eigen::Index n = p.eigenvalues.size();
  const auto k0 = static_cast<Eigen::Index>(options.k0);
  if (k0 <= 1) throw InvalidArgument("min_rate: k0 must exceed 1");
  if (k0 >= n) {
    throw InvalidArgument("min_rate: k0 = " + std::to_string(k0) + " must be below N = " +
                          std::to_string(n));
  }
  if (!(options.tol_sigma > 0.0) || !(options.tol_r > 0.0)) {
    throw InvalidArgument("min_rate: tolerances must be positive");
  }
  if (mean_returns.size() != n) throw InvalidArgument("min_rate: mean_returns must have N entries");

  const Eigen::VectorXd& lambda = p.eigenvalues;
  const double zero_floor = kZeroEigenvalueRatio * lambda(0);
  auto is_zero = [&](Eigen::Index i) { return !(lambda(i) > zero_floor); };
  for (Eigen::Index i = 0; i < k0; ++i) {
    if (is_zero(i)) {
      throw InvalidArgument("min_rate: composite " + std::to_string(i + 1) +
                            " within the starting set has zero variance");
    }
  }

  Eigen::VectorXd means(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pc_mean = p.components.rows() > 0 ? p.components.col(j).mean() : 0.0;
    means(j) = pc_mean + p.eigenvectors.col(j).dot(mean_returns);
  }

  MinRateResult out;
  Eigen::Index j = k0;
  Portfolio prev = inverse_variance_portfolio(lambda, means, j);
  out.history.push_back({static_cast<std::size_t>(j), prev.r, prev.sigma});
  Portfolio chosen = prev;
  Eigen::Index chosen_j = j;
  out.reason = MinRateStop::kExhausted;

  while (true) {
    if (j == n) {
      out.reason = MinRateStop::kExhausted;
      break;
    }
    if (is_zero(j)) {
      out.reason = MinRateStop::kZeroEigenvalue;
      break;
    }
    ++j;
    const Portfolio cur = inverse_variance_portfolio(lambda, means, j);
    out.history.push_back({static_cast<std::size_t>(j), cur.r, cur.sigma});
    if (cur.sigma - prev.sigma > options.tol_sigma || cur.r - prev.r > options.tol_r) {
      out.reason = MinRateStop::kToleranceBreached;
      if (options.stop == StopRule::kReturnBreaching) {
        chosen = cur;
        chosen_j = j;
      }
      break;
    }
    prev = cur;
    chosen = cur;
    chosen_j = j;
  }

  out.j_star = static_cast<std::size_t>(chosen_j);
  out.r = chosen.r;
  out.sigma_r = chosen.sigma;
  out.weights = chosen.weights;
  return out;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += u[static_cast<std::size_t>(i)];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

FullUniverseResult compare_full_universe(const MinRateResult& composite,
                                         const Eigen::VectorXd& mean_returns,
                                         const Eigen::MatrixXd& covariance,
                                         const FullUniverseOptions& options) {
  const Eigen::Index n = covariance.rows();
  if (n < 1 || covariance.cols() != n) throw InvalidArgument("covariance must be square");
  if (mean_returns.size() != n) throw InvalidArgument("mean_returns must have N entries");
  if (!covariance.allFinite()) throw InvalidArgument("covariance contains non-finite values");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin < -1e-12 * std::max(1.0, std::abs(lmax))) {
    throw InvalidArgument("covariance is not positive semidefinite");
  }

  FullUniverseResult out;
  Eigen::VectorXd q = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  if (lmax > 0.0) {
    // f(q) = q' C q, gradient 2 C q, Lipschitz constant 2 lmax.
    const double step = 1.0 / (2.0 * lmax);
    // Frank-Wolfe gap g'q - min_i g_i bounds f(q) - f*; scaled by the mean variance.
    const double gap_tol = options.tolerance * 1e-2 * covariance.trace() / static_cast<double>(n);
    Eigen::VectorXd y = q;
    double t = 1.0;
    double f_prev = q.dot(covariance * q);
    bool converged = false;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
      const Eigen::VectorXd next = project_to_simplex(y - step * 2.0 * (covariance * y));
      const double f_next = next.dot(covariance * next);
      if (f_next > f_prev && t > 1.0) {
        // Momentum overshot: restart from the current iterate.
        y = q;
        t = 1.0;
        continue;
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double change = (next - q).cwiseAbs().maxCoeff();
      y = next + ((t - 1.0) / t_next) * (next - q);
      q = next;
      t = t_next;
      f_prev = f_next;
      const Eigen::VectorXd grad = 2.0 * (covariance * q);
      const double gap = grad.dot(q) - grad.minCoeff();
      if (change <= options.tolerance || gap <= gap_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("compare_full_universe: no convergence after " +
                             std::to_string(options.max_iterations) + " iterations");
    }
    out.iterations = it + 1;
  }
  out.weights = q;
  out.r_n = q.dot(mean_returns);
  out.sigma_r_n = std::sqrt(std::max(0.0, q.dot(covariance * q)));
  out.sigma_ratio = out.sigma_r_n > 0.0 ? composite.sigma_r / out.sigma_r_n : 0.0;
  return out;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x, VarianceDivisor divisor) {
  if (x.rows() < 2) throw InvalidArgument("sample_covariance needs at least 2 rows");
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  return (c.transpose() * c) / divisor_value(divisor, x.rows());
}

}  // namespace srr
