#include "srr/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "srr/error.hpp"

namespace srr {

NormalStream::NormalStream(std::uint64_t seed) : engine_(seed) {}

// Uniform on (0, 1) from the top 53 bits; never returns 0.
double NormalStream::next_open_unit() {
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_open_unit();
  const double u2 = next_open_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd log_drift(const GbmSpec& spec) {
  return spec.mu - 0.5 * spec.sigma.rowwise().squaredNorm();
}

SimulatedMarket simulate_gbm(const GbmSpec& spec) {
  const Eigen::Index n = spec.mu.size();
  if (n < 1) throw InvalidArgument("simulate_gbm: empty drift vector");
  if (spec.sigma.rows() != n || spec.sigma.cols() != std::max<Eigen::Index>(n - 1, 0)) {
    throw InvalidArgument("simulate_gbm: sigma must be N x (N-1)");
  }
  if (spec.s0.size() != n) throw InvalidArgument("simulate_gbm: s0 must have N entries");
  if ((spec.s0.array() <= 0.0).any()) throw InvalidArgument("simulate_gbm: s0 must be positive");
  if (spec.steps < 2) throw InvalidArgument("simulate_gbm: steps must be at least 2");

  const Eigen::VectorXd drift = log_drift(spec);
  const Eigen::Index factors = spec.sigma.cols();

  SimulatedMarket out;
  out.prices.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& s = out.prices[static_cast<std::size_t>(j)];
    s.asset_id = "A" + std::to_string(j + 1);
    s.dates.reserve(spec.steps);
    s.prices.reserve(spec.steps);
    s.dates.push_back(spec.start_date);
    s.prices.push_back(spec.s0(j));
  }

  NormalStream normals(spec.seed);
  Eigen::VectorXd z(factors);
  for (std::size_t m = 1; m < spec.steps; ++m) {
    for (Eigen::Index k = 0; k < factors; ++k) z(k) = normals.next();
    const Eigen::VectorXd increment = drift + spec.sigma * z;
    const Date d = spec.start_date + std::chrono::days{static_cast<int>(m)};
    for (Eigen::Index j = 0; j < n; ++j) {
      // Multiplicative update: accumulating ln S instead would round at the
      // scale of ln S (~1e-15 absolute) rather than of the daily return.
      auto& s = out.prices[static_cast<std::size_t>(j)];
      const double next = s.prices.back() * std::exp(increment(j));
      s.dates.push_back(d);
      s.prices.push_back(next);
    }
  }
  out.returns = log_returns(out.prices, AlignPolicy::kErrorOnGap);
  return out;
}

}  // namespace srr
