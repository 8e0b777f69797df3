#pragma once

// Positional spread of lane points. The confidence profile across a lane is
// modelled as a Gaussian centred on the detected point, so the profile drops
// to exp(-1/2) of the peak confidence at one standard deviation. sigma is
// found by walking along the lane normal until that level is crossed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include "lanetrack/errors.hpp"
#include "lanetrack/probmap.hpp"
#include "lanetrack/types.hpp"

namespace lanetrack {

struct VarianceConfig {
  double sigma_step = 0.25;  // px
  double sigma_cap = 0.0;    // px; <= 0 means 5% of map width
  double sigma_floor = 0.05; // px

  double cap_for(const ProbabilityMap& map) const {
    return sigma_cap > 0.0 ? sigma_cap : 0.05 * map.width();
  }
};

namespace detail {

// Distance along one side of the normal to the exp(-1/2) crossing.
// nullopt when the raster edge is reached first.
inline std::optional<double> side_distance(const ProbabilityMap& map, std::uint32_t channel,
                                           const RawPoint& point, Direction dir, double threshold,
                                           double step, double cap) {
  double prev_t = 0.0;
  double prev_v = map.contains(point.x, point.y) ? map.sample(channel, point.x, point.y) : point.confidence;
  if (prev_v <= threshold) return 0.0;
  for (int i = 1;; ++i) {
    const double t = i * step;
    if (t > cap) return cap;
    const double x = point.x + t * dir.dx;
    const double y = point.y + t * dir.dy;
    if (!map.contains(x, y)) return std::nullopt;
    const double v = map.sample(channel, x, y);
    if (v <= threshold) {
      // linear refinement between the last two samples
      const double crossing = prev_t + (prev_v - threshold) / (prev_v - v) * (t - prev_t);
      return std::min(crossing, cap);
    }
    prev_t = t;
    prev_v = v;
  }
}

}  // namespace detail

inline double estimate_point_sigma(const ProbabilityMap& map, std::uint32_t channel,
                                   const RawPoint& point, Direction normal,
                                   const VarianceConfig& cfg = {}) {
  if (!(point.confidence > 0.0)) {
    throw PreconditionError("point confidence must be positive");
  }
  const double len = std::hypot(normal.dx, normal.dy);
  if (std::abs(len - 1.0) > 1e-6) {
    throw PreconditionError("normal must be unit length");
  }
  const double cap = cfg.cap_for(map);
  const double threshold = std::exp(-0.5) * point.confidence;
  const auto plus = detail::side_distance(map, channel, point, normal, threshold, cfg.sigma_step, cap);
  const auto minus = detail::side_distance(map, channel, point, {-normal.dx, -normal.dy}, threshold,
                                           cfg.sigma_step, cap);
  double sigma = cap;
  if (plus && minus) {
    sigma = 0.5 * (*plus + *minus);
  } else if (plus) {
    sigma = *plus;
  } else if (minus) {
    sigma = *minus;
  }
  return std::clamp(sigma, std::min(cfg.sigma_floor, cap), cap);
}

// RMS of the point sigmas.
inline double lane_sigma(std::span<const LanePoint> points) {
  if (points.empty()) {
    throw PreconditionError("lane_sigma of an empty point list");
  }
  double sum = 0.0;
  for (const auto& p : points) sum += p.sigma * p.sigma;
  return std::sqrt(sum / static_cast<double>(points.size()));
}

}  // namespace lanetrack
