#include "srr/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srr/error.hpp"

namespace srr {

namespace {

// previous -/+ width rounds to the nearest double, which can land one ulp
// outside the band. Step the edge back toward previous until the band holds
// both as a difference and as a ratio.
double inside_edge(double previous, double edge, double width, double epsilon) {
  auto outside = [&](double e) {
    return std::abs(e - previous) > width ||
           (previous != 0.0 && std::abs(e / previous - 1.0) > epsilon);
  };
  while (edge != previous && outside(edge)) edge = std::nextafter(edge, previous);
  return edge;
}

}  // namespace

Band clamp_band(double previous, double epsilon) {
  const double width = epsilon * std::abs(previous);
  return {inside_edge(previous, previous - width, width, epsilon),
          inside_edge(previous, previous + width, width, epsilon)};
}

ClampStep clamp(const ClampState& state, double raw) {
  ClampState next = state;
  if (!state.initialized || state.previous == 0.0) {
    next.previous = raw;
    next.initialized = true;
    return {raw, next};
  }
  const Band band = clamp_band(state.previous, state.epsilon);
  const double value = raw >= state.previous ? std::min(raw, band.upper)
                                             : std::max(raw, band.lower);
  next.previous = value;
  return {value, next};
}

std::string_view to_string(SvdMode mode) {
  return mode == SvdMode::kMinOnly ? "min" : "all";
}

SvdMode parse_svd_mode(std::string_view text) {
  if (text == "min" || text == "min-only") return SvdMode::kMinOnly;
  if (text == "all") return SvdMode::kAll;
  throw InvalidArgument("unknown svd mode '" + std::string(text) + "'");
}

RegularizedSvd regularize_singulars(const Eigen::VectorXd& d, std::span<ClampState> states,
                                    SvdMode mode) {
  if (static_cast<Eigen::Index>(states.size()) != d.size()) {
    throw InvalidArgument("regularize_singulars: " + std::to_string(states.size()) +
                          " states for " + std::to_string(d.size()) + " singular values");
  }
  RegularizedSvd out{d, mode};
  const Eigen::Index n = d.size();
  const Eigen::Index first = mode == SvdMode::kMinOnly ? n - 1 : 0;
  for (Eigen::Index i = first; i < n; ++i) {
    auto& state = states[static_cast<std::size_t>(i)];
    const ClampStep step = clamp(state, d(i));
    state = step.state;
    out.d_bar(i) = step.value;
  }
  return out;
}

std::vector<double> secondary_regularize(std::span<const double> series, double delta) {
  std::vector<double> out;
  out.reserve(series.size());
  ClampState state{0.0, delta, false};
  for (double raw : series) {
    const ClampStep step = clamp(state, raw);
    state = step.state;
    out.push_back(step.value);
  }
  return out;
}

}  // namespace srr
