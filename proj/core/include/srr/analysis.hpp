#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "srr/pca.hpp"

namespace srr {

struct QuantileSummary {
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

// Linear interpolation between order statistics at 1 + (n - 1) p.
double quantile(std::span<const double> sorted, double p);

QuantileSummary quantiles(std::span<const double> series);
// Not-available entries are dropped first; throws if nothing is left.
QuantileSummary quantiles(const std::vector<std::optional<double>>& series);

// What the composite-asset loop returns once a tolerance is breached.
enum class StopRule {
  kReturnBreaching,  // the portfolio that breached (as the published loop reads)
  kReturnPrevious,   // the last portfolio that stayed inside tolerance
};

enum class MinRateStop {
  kToleranceBreached,
  kZeroEigenvalue,  // next composite has no variance
  kExhausted,       // all N composites used
};

std::string_view to_string(MinRateStop stop);

struct MinRateOptions {
  std::size_t k0 = 2;
  double tol_sigma = 0.0;
  double tol_r = 0.0;
  StopRule stop = StopRule::kReturnBreaching;
};

struct MinRateStep {
  std::size_t j = 0;
  double r = 0.0;
  double sigma = 0.0;
};

struct MinRateResult {
  std::size_t j_star = 0;
  double r = 0.0;
  double sigma_r = 0.0;
  Eigen::VectorXd weights;            // over composites 1..j_star, sum to 1
  std::vector<MinRateStep> history;   // every portfolio evaluated, k0 first
  MinRateStop reason = MinRateStop::kExhausted;
};

// Minimum-variance portfolio over the first j principal-component composites,
// grown from j = k0 until sigma or r increases by more than its tolerance.
// Composites are uncorrelated with variance lambda_i, so the long-only
// minimum-variance weights are q_i proportional to 1 / lambda_i.
// mean_returns are the original (pre-centering) asset means; composite i
// earns mean(p_i) + w_i . mean_returns.
MinRateResult min_rate(const PcaResult& p, const Eigen::VectorXd& mean_returns,
                       const MinRateOptions& options);

struct FullUniverseOptions {
  std::size_t max_iterations = 1'000'000;
  double tolerance = 1e-13;
};

struct FullUniverseResult {
  double r_n = 0.0;
  double sigma_r_n = 0.0;
  Eigen::VectorXd weights;
  std::size_t iterations = 0;
  // sigma_r of the composite portfolio divided by sigma_r_n.
  double sigma_ratio = 0.0;
};

// Long-only minimum-variance portfolio on the original assets, solved by
// accelerated projected gradient on the probability simplex.
FullUniverseResult compare_full_universe(const MinRateResult& composite,
                                         const Eigen::VectorXd& mean_returns,
                                         const Eigen::MatrixXd& covariance,
                                         const FullUniverseOptions& options = {});

// Euclidean projection onto {q : q >= 0, sum q = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x,
                                  VarianceDivisor divisor = VarianceDivisor::kSampleMinusOne);

}  // namespace srr
