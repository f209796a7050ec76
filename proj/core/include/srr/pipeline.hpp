#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "srr/calibration.hpp"
#include "srr/date.hpp"
#include "srr/market_data.hpp"
#include "srr/regularization.hpp"
#include "srr/solver.hpp"

namespace srr {

struct PipelineConfig {
  std::size_t window_m = 2500;
  CalibrationMethod method = CalibrationMethod::kDirect;
  double epsilon = 0.005;       // singular-value band
  double delta_nu = 1e-5;       // secondary band on nu
  double delta_sigma = 1e-3;    // secondary band on each sigma_pi_k
  // Unset: min-only for the direct method, all for regression.
  std::optional<SvdMode> svd_mode;
  VarianceDivisor pca_divisor = VarianceDivisor::kSampleMinusOne;
  VarianceDivisor regression_divisor = VarianceDivisor::kSampleMinusOne;
  // Worker threads for the per-date calibration; 0 picks hardware concurrency.
  unsigned threads = 0;

  SvdMode effective_svd_mode() const;
  CalibrationOptions calibration_options() const;
  // Throws InvalidArgument unless window_m > n_assets and all bands are positive.
  void validate(std::size_t n_assets) const;
};

// One output date. Optional fields are empty where a solve was impossible
// (singular Phi on the raw path, or before the regularized path has a value).
struct SrrSeriesRow {
  Date date{};
  std::optional<double> nu_raw;
  std::optional<double> nu_eps;
  std::optional<double> nu_hat;
  std::optional<double> sigma_pi_raw;
  std::optional<double> sigma_pi_hat;
  double kappa_raw = 0.0;
  double kappa_eps = 0.0;
  double d_min_raw = 0.0;
  double d_min_eps = 0.0;
  // Residual of the regularized solve against the unregularized Phi.
  std::optional<double> residual_norm;
  Eigen::VectorXd singular_values;  // raw d_1..d_N of Phi
};

// Everything the recursive regularizers remember between dates.
struct EngineState {
  std::vector<ClampState> singular;  // one per singular value of Phi
  ClampState nu;
  std::vector<ClampState> sigma_pi;  // one per sigma_pi_k
};

EngineState initial_state(const PipelineConfig& cfg, std::size_t n_assets);

// Moving-window SRR engine. Dates must be fed in increasing order; the clamp
// recursions make the fold strictly sequential, while calibration of
// distinct dates inside run() proceeds in parallel.
class SrrEngine {
 public:
  SrrEngine(PipelineConfig cfg, std::size_t n_assets);
  SrrEngine(PipelineConfig cfg, EngineState state);

  // Advances one date from an already calibrated model.
  SrrSeriesRow step(const CalibratedModel& model);

  // Rows for window end indices first_end..last_end inclusive.
  std::vector<SrrSeriesRow> run(const ReturnMatrix& r, std::size_t first_end,
                                std::size_t last_end);

  const EngineState& state() const { return state_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  struct DateSolve;

  DateSolve evaluate(const CalibratedModel& model) const;
  SrrSeriesRow fold(const DateSolve& solve);

  PipelineConfig cfg_;
  std::size_t n_assets_;
  EngineState state_;
};

// Full series for every date with a complete trailing window.
std::vector<SrrSeriesRow> run_srr_series(const ReturnMatrix& r, const PipelineConfig& cfg);

struct TrajectoryPoint {
  Date date{};
  double sigma_pi_hat = 0.0;
  double nu_hat = 0.0;
};

// (sigma_pi_hat, nu_hat) in date order; rows missing either value are skipped.
std::vector<TrajectoryPoint> trajectory(const std::vector<SrrSeriesRow>& rows);

// date,nu_raw,nu_eps,nu_hat,sigma_pi_raw,sigma_pi_hat,kappa_raw,kappa_eps,d_min_raw,d_min_eps,residual_norm
void write_srr_csv(std::ostream& out, const std::vector<SrrSeriesRow>& rows);
// date,d_1,...,d_N
void write_singular_values_csv(std::ostream& out, const std::vector<SrrSeriesRow>& rows);

}  // namespace srr
