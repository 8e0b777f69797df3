#pragma once

// Candidate lane points: per-row argmax above a confidence threshold, then
// each point is moved to the strongest response along the normal of an
// initial line fit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/geometry.hpp"
#include "lanetrack/lane_fit.hpp"
#include "lanetrack/probmap.hpp"
#include "lanetrack/types.hpp"

namespace lanetrack {

struct ExtractionConfig {
  std::uint32_t row_stride = 4;
  double min_confidence = 0.3;
  double normal_halfwidth = 0.0;  // px; <= 0 means 15 px per 800 px of map width
  double horizon_frac = 0.35;     // top fraction of rows skipped
  double refine_step = 0.25;      // px, sampling step along the normal

  double halfwidth_for(const ProbabilityMap& map) const {
    return normal_halfwidth > 0.0 ? normal_halfwidth : 15.0 * map.width() / 800.0;
  }

  void validate() const {
    if (row_stride < 1) throw ConfigError("row_stride must be >= 1");
    if (!(min_confidence > 0.0 && min_confidence < 1.0)) {
      throw ConfigError("min_confidence must be in (0,1)");
    }
    if (!(horizon_frac >= 0.0 && horizon_frac < 1.0)) {
      throw ConfigError("horizon_frac must be in [0,1)");
    }
    if (!(refine_step > 0.0)) throw ConfigError("refine_step must be positive");
  }
};

// First row scanned (rows above it are skipped).
inline std::uint32_t horizon_row(const ProbabilityMap& map, double horizon_frac) {
  return static_cast<std::uint32_t>(std::ceil(horizon_frac * map.height()));
}

namespace detail {

inline std::vector<RawPoint> row_maxima(const ProbabilityMap& map, std::uint32_t channel,
                                        const ExtractionConfig& cfg) {
  std::vector<RawPoint> points;
  const auto top = horizon_row(map, cfg.horizon_frac);
  for (std::int64_t y = map.height() - 1; y >= static_cast<std::int64_t>(top); y -= cfg.row_stride) {
    const auto row = map.row(channel, static_cast<std::uint32_t>(y));
    const auto best = std::max_element(row.begin(), row.end());
    if (*best >= cfg.min_confidence) {
      points.push_back({static_cast<double>(best - row.begin()), static_cast<double>(y), *best});
    }
  }
  std::reverse(points.begin(), points.end());
  return points;
}

// Strongest sample within +-halfwidth along `normal`, with a parabolic
// sub-pixel step around it. Confidence is the best sampled value, so it never
// drops below the starting point's.
inline RawPoint refine_along_normal(const ProbabilityMap& map, std::uint32_t channel, RawPoint p,
                                    Direction normal, double halfwidth, double step) {
  const int n = static_cast<int>(std::floor(halfwidth / step));
  double best_t = 0.0;
  double best_v = p.confidence;
  for (int i = -n; i <= n; ++i) {
    if (i == 0) continue;
    const double t = i * step;
    const double x = p.x + t * normal.dx;
    const double y = p.y + t * normal.dy;
    if (!map.contains(x, y)) continue;
    const double v = map.sample(channel, x, y);
    if (v > best_v || (v == best_v && best_t != 0.0 && std::abs(t) < std::abs(best_t))) {
      best_v = v;
      best_t = t;
    }
  }
  auto at = [&](double t) {
    return RawPoint{p.x + t * normal.dx, p.y + t * normal.dy, 0.0};
  };
  RawPoint out = at(best_t);
  out.confidence = best_v;
  const RawPoint lo = at(best_t - 1.0);
  const RawPoint hi = at(best_t + 1.0);
  if (map.contains(lo.x, lo.y) && map.contains(hi.x, hi.y)) {
    const double vl = map.sample(channel, lo.x, lo.y);
    const double vh = map.sample(channel, hi.x, hi.y);
    const double curvature = vl - 2.0 * best_v + vh;
    if (curvature < 0.0) {
      const double offset = std::clamp(0.5 * (vl - vh) / curvature, -0.5, 0.5);
      out = at(best_t + offset);
      out.confidence = best_v;
    }
  }
  return out;
}

}  // namespace detail

inline RawLanePoints extract_points(const ProbabilityMap& map, std::uint32_t channel,
                                    const ExtractionConfig& cfg = {}) {
  if (channel >= map.channels()) {
    throw RangeError("channel " + std::to_string(channel) + " out of range");
  }
  cfg.validate();
  RawLanePoints out{channel, detail::row_maxima(map, channel, cfg)};
  if (out.points.size() < 2) return out;

  const auto initial = fit_confidence_weighted(std::span<const RawPoint>(out.points));
  const Direction normal = unit_normal(initial.line);
  const double halfwidth = cfg.halfwidth_for(map);
  for (auto& p : out.points) {
    p = detail::refine_along_normal(map, channel, p, normal, halfwidth, cfg.refine_step);
  }
  // Moving along a slanted normal shifts y slightly; restore strict ordering.
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const RawPoint& a, const RawPoint& b) { return a.y < b.y; });
  out.points.erase(std::unique(out.points.begin(), out.points.end(),
                               [](const RawPoint& a, const RawPoint& b) { return a.y == b.y; }),
                   out.points.end());
  return out;
}

}  // namespace lanetrack
