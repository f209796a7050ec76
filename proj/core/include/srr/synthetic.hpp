#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "srr/date.hpp"
#include "srr/market_data.hpp"

namespace srr {

// Correlated GBM with N assets driven by N-1 Brownian motions, per-day units.
struct GbmSpec {
  Eigen::VectorXd mu;     // drift of dS/S
  Eigen::MatrixXd sigma;  // N x (N-1) loadings
  Eigen::VectorXd s0;     // initial prices, > 0
  std::size_t steps = 2;  // number of price observations (returns = steps - 1)
  std::uint64_t seed = 0;
  Date start_date = std::chrono::sys_days{std::chrono::year{2000} / 1 / 3};
};

struct SimulatedMarket {
  std::vector<PriceSeries> prices;
  ReturnMatrix returns;  // log_returns(prices), exactly
};

// Seeded standard normals: mt19937_64 feeding a Box-Muller transform. The
// stream is fully specified, so sequences match across platforms.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;

  double next_open_unit();
};

// Exact log scheme with dt = 1 day:
//   ln(S_j,m / S_j,m-1) = mu_j - |sigma_j|^2 / 2 + sum_k sigma_jk Z_mk.
// Asset ids are A1..AN; dates are consecutive calendar days from start_date.
SimulatedMarket simulate_gbm(const GbmSpec& spec);

// Log-drift the simulated returns actually carry: mu_j - |sigma_j|^2 / 2.
Eigen::VectorXd log_drift(const GbmSpec& spec);

}  // namespace srr
