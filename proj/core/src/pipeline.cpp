#include "srr/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <string>
#include <thread>

#include "srr/csv.hpp"
#include "srr/error.hpp"

namespace srr {

SvdMode PipelineConfig::effective_svd_mode() const {
  if (svd_mode) return *svd_mode;
  return method == CalibrationMethod::kDirect ? SvdMode::kMinOnly : SvdMode::kAll;
}

CalibrationOptions PipelineConfig::calibration_options() const {
  return {method, pca_divisor, regression_divisor};
}

void PipelineConfig::validate(std::size_t n_assets) const {
  if (n_assets < 2) throw InvalidArgument("pipeline needs at least 2 assets");
  if (window_m <= n_assets) {
    throw InvalidArgument("window length " + std::to_string(window_m) +
                          " must exceed the number of assets " + std::to_string(n_assets));
  }
  if (!(epsilon > 0.0) || !(delta_nu > 0.0) || !(delta_sigma > 0.0)) {
    throw InvalidArgument("epsilon, delta_nu and delta_sigma must be positive");
  }
}

EngineState initial_state(const PipelineConfig& cfg, std::size_t n_assets) {
  EngineState s;
  s.singular.assign(n_assets, ClampState{0.0, cfg.epsilon, false});
  s.nu = ClampState{0.0, cfg.delta_nu, false};
  s.sigma_pi.assign(n_assets - 1, ClampState{0.0, cfg.delta_sigma, false});
  return s;
}

struct SrrEngine::DateSolve {
  Date date{};
  PhiSystem system;
  SvdFactors factors;
  std::optional<DeflatorSolution> raw;
  double kappa_raw = 0.0;
};

SrrEngine::SrrEngine(PipelineConfig cfg, std::size_t n_assets)
    : cfg_(std::move(cfg)), n_assets_(n_assets) {
  cfg_.validate(n_assets_);
  state_ = initial_state(cfg_, n_assets_);
}

SrrEngine::SrrEngine(PipelineConfig cfg, EngineState state)
    : cfg_(std::move(cfg)), n_assets_(state.singular.size()), state_(std::move(state)) {
  cfg_.validate(n_assets_);
  if (state_.sigma_pi.size() + 1 != n_assets_) {
    throw InvalidArgument("engine state has inconsistent sizes");
  }
}

SrrEngine::DateSolve SrrEngine::evaluate(const CalibratedModel& model) const {
  if (static_cast<std::size_t>(model.mu.size()) != n_assets_) {
    throw InvalidArgument("model has " + std::to_string(model.mu.size()) +
                          " assets, engine expects " + std::to_string(n_assets_));
  }
  DateSolve out;
  out.date = model.window_end_date;
  out.system = build_phi(model.sigma, model.mu);
  out.factors = svd(out.system.phi);
  out.kappa_raw = condition_number_from_singular_values(out.factors.d);
  try {
    out.raw = solve_lu(out.system, out.kappa_raw);
  } catch (const SingularMatrixError&) {
    out.raw.reset();
  }
  return out;
}

SrrSeriesRow SrrEngine::fold(const DateSolve& solve) {
  SrrSeriesRow row;
  row.date = solve.date;
  row.singular_values = solve.factors.d;
  row.kappa_raw = solve.kappa_raw;
  row.d_min_raw = solve.factors.d(solve.factors.d.size() - 1);
  if (solve.raw) {
    row.nu_raw = solve.raw->nu;
    row.sigma_pi_raw = solve.raw->sigma_pi_total;
  }

  const RegularizedSvd reg =
      regularize_singulars(solve.factors.d, state_.singular, cfg_.effective_svd_mode());
  row.d_min_eps = reg.d_bar(reg.d_bar.size() - 1);
  row.kappa_eps = condition_number_from_singular_values(reg.d_bar);

  std::optional<DeflatorSolution> regularized;
  try {
    regularized = solve_svd(solve.system, solve.factors, reg.d_bar);
  } catch (const SingularMatrixError&) {
    regularized.reset();
  }
  if (!regularized) return row;

  row.nu_eps = regularized->nu;
  row.residual_norm = regularized->residual_norm;

  const ClampStep nu_step = clamp(state_.nu, regularized->nu);
  state_.nu = nu_step.state;
  row.nu_hat = nu_step.value;

  Eigen::VectorXd sigma_hat(regularized->sigma_pi_vec.size());
  for (Eigen::Index k = 0; k < sigma_hat.size(); ++k) {
    auto& st = state_.sigma_pi[static_cast<std::size_t>(k)];
    const ClampStep s = clamp(st, regularized->sigma_pi_vec(k));
    st = s.state;
    sigma_hat(k) = s.value;
  }
  row.sigma_pi_hat = total_volatility(sigma_hat);
  return row;
}

SrrSeriesRow SrrEngine::step(const CalibratedModel& model) { return fold(evaluate(model)); }

std::vector<SrrSeriesRow> SrrEngine::run(const ReturnMatrix& r, std::size_t first_end,
                                         std::size_t last_end) {
  if (r.assets() != n_assets_) {
    throw InvalidArgument("panel has " + std::to_string(r.assets()) +
                          " assets, engine expects " + std::to_string(n_assets_));
  }
  if (last_end < first_end) return {};
  if (last_end >= r.rows()) {
    throw InvalidArgument("end index " + std::to_string(last_end) + " beyond panel of " +
                          std::to_string(r.rows()) + " rows");
  }
  if (first_end + 1 < cfg_.window_m) {
    throw InsufficientHistory("insufficient history: window of " +
                              std::to_string(cfg_.window_m) + " rows needs end index >= " +
                              std::to_string(cfg_.window_m - 1));
  }

  unsigned workers = cfg_.threads ? cfg_.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);
  const std::size_t total = last_end - first_end + 1;
  const std::size_t chunk = std::max<std::size_t>(64, 16 * workers);
  const CalibrationOptions options = cfg_.calibration_options();

  std::vector<SrrSeriesRow> rows;
  rows.reserve(total);
  std::vector<std::optional<DateSolve>> solved;
  std::vector<std::exception_ptr> errors;

  for (std::size_t begin = 0; begin < total; begin += chunk) {
    const std::size_t count = std::min(chunk, total - begin);
    solved.assign(count, std::nullopt);
    errors.assign(count, nullptr);

    auto work = [&](std::size_t worker) {
      for (std::size_t i = worker; i < count; i += workers) {
        try {
          const auto win = window(r, first_end + begin + i, cfg_.window_m);
          solved[i] = evaluate(calibrate(win, options));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (used <= 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(used);
      for (unsigned w = 0; w < used; ++w) pool.emplace_back(work, w);
    }

    for (std::size_t i = 0; i < count; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      rows.push_back(fold(*solved[i]));
    }
  }
  return rows;
}

std::vector<SrrSeriesRow> run_srr_series(const ReturnMatrix& r, const PipelineConfig& cfg) {
  cfg.validate(r.assets());
  if (r.rows() < cfg.window_m) {
    throw InsufficientHistory("insufficient history: window of " +
                              std::to_string(cfg.window_m) + " rows but only " +
                              std::to_string(r.rows()) + " returns available");
  }
  SrrEngine engine(cfg, r.assets());
  return engine.run(r, cfg.window_m - 1, r.rows() - 1);
}

std::vector<TrajectoryPoint> trajectory(const std::vector<SrrSeriesRow>& rows) {
  std::vector<TrajectoryPoint> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.sigma_pi_hat && row.nu_hat) out.push_back({row.date, *row.sigma_pi_hat, *row.nu_hat});
  }
  return out;
}

void write_srr_csv(std::ostream& out, const std::vector<SrrSeriesRow>& rows) {
  out << "date,nu_raw,nu_eps,nu_hat,sigma_pi_raw,sigma_pi_hat,kappa_raw,kappa_eps,"
         "d_min_raw,d_min_eps,residual_norm\n";
  using csv::format_double;
  using csv::format_optional;
  for (const auto& row : rows) {
    out << format_date(row.date) << ',' << format_optional(row.nu_raw) << ','
        << format_optional(row.nu_eps) << ',' << format_optional(row.nu_hat) << ','
        << format_optional(row.sigma_pi_raw) << ',' << format_optional(row.sigma_pi_hat) << ','
        << format_double(row.kappa_raw) << ',' << format_double(row.kappa_eps) << ','
        << format_double(row.d_min_raw) << ',' << format_double(row.d_min_eps) << ','
        << format_optional(row.residual_norm) << '\n';
  }
}

void write_singular_values_csv(std::ostream& out, const std::vector<SrrSeriesRow>& rows) {
  const Eigen::Index n = rows.empty() ? 0 : rows.front().singular_values.size();
  out << "date";
  for (Eigen::Index j = 1; j <= n; ++j) out << ",d_" << j;
  out << '\n';
  for (const auto& row : rows) {
    out << format_date(row.date);
    for (Eigen::Index j = 0; j < row.singular_values.size(); ++j) {
      out << ',' << csv::format_double(row.singular_values(j));
    }
    out << '\n';
  }
}

}  // namespace srr
