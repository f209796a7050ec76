#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace srr {

// Memory of the recursive relative-rate limiter.
struct ClampState {
  double previous = 0.0;
  double epsilon = 0.005;
  bool initialized = false;
};

struct ClampStep {
  double value;
  ClampState state;
};

struct Band {
  double lower;
  double upper;
};

// Admissible interval around `previous`: previous -/+ epsilon * |previous|.
Band clamp_band(double previous, double epsilon);

// One step of the limiter. The first value seeds the state unchanged; later
// values are held inside clamp_band(previous). A previous value of exactly 0
// has an empty band, so the raw value passes through and re-seeds.
ClampStep clamp(const ClampState& state, double raw);

enum class SvdMode {
  kMinOnly,  // clamp only the smallest singular value
  kAll,      // clamp every singular value with its own state
};

std::string_view to_string(SvdMode mode);
SvdMode parse_svd_mode(std::string_view text);

struct RegularizedSvd {
  Eigen::VectorXd d_bar;
  SvdMode mode = SvdMode::kMinOnly;
};

// `states` holds one entry per singular value and is advanced in place; in
// min-only mode only the last entry is touched.
RegularizedSvd regularize_singulars(const Eigen::VectorXd& d, std::span<ClampState> states,
                                    SvdMode mode);

// Clamp fold over a whole series with band `delta`, seeded at the first element.
std::vector<double> secondary_regularize(std::span<const double> series, double delta);

}  // namespace srr
