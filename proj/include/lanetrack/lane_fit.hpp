#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/geometry.hpp"
#include "lanetrack/types.hpp"

namespace lanetrack {

struct LineFit {
  Line line;
  HesseLine hesse;
  YSpan y_span;

  friend bool operator==(const LineFit&, const LineFit&) = default;
};

/// Weighted least squares fit of x on y.
///
/// Minimizes sum w_i (x_i - m y_i - b)^2. Uses centred sums, so the result
/// does not depend on where the origin sits. Throws FitError when the
/// weighted spread of y is zero (all points on one row).
template <typename Point, typename WeightFn>
LineFit fit_line(std::span<const Point> points, WeightFn&& weight) {
  if (points.size() < 2) {
    throw FitError("line fit needs at least two points");
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  YSpan span{points.front().y, points.front().y};
  for (const auto& p : points) {
    const double w = weight(p);
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw PreconditionError("line fit weights must be positive and finite");
    }
    sw += w;
    sx += w * p.x;
    sy += w * p.y;
    span.min = std::min(span.min, p.y);
    span.max = std::max(span.max, p.y);
  }
  const double x_mean = sx / sw;
  const double y_mean = sy / sw;
  double syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double w = weight(p);
    const double dy = p.y - y_mean;
    syy += w * dy * dy;
    sxy += w * dy * (p.x - x_mean);
  }
  const double scale = std::max(std::abs(span.min), std::abs(span.max)) + 1.0;
  if (!(syy > 1e-12 * sw * scale * scale)) {
    throw FitError("degenerate line fit: all points on one row");
  }
  const Line line{sxy / syy, x_mean - (sxy / syy) * y_mean};
  return {line, to_hesse(line), span};
}

// Fit with weights c_i / sigma_i^2.
inline LineFit fit_weighted(std::span<const LanePoint> points) {
  return fit_line(points, [](const LanePoint& p) {
    if (!(p.sigma > 0.0)) throw PreconditionError("lane point sigma must be positive");
    return p.confidence / (p.sigma * p.sigma);
  });
}

// Fit with confidence-only weights, used before per-point sigma is known.
inline LineFit fit_confidence_weighted(std::span<const RawPoint> points) {
  return fit_line(points, [](const RawPoint& p) { return p.confidence; });
}

struct DetectedLane {
  std::uint32_t channel = 0;
  std::vector<LanePoint> points;
  LineFit fit;
  double rms_confidence = 0.0;  // c_f
  std::size_t point_count = 0;  // N_f
  double sigma = 0.0;           // RMS of point sigmas
};

inline double rms_confidence(std::span<const LanePoint> points) {
  if (points.empty()) throw PreconditionError("rms_confidence of an empty point list");
  double sum = 0.0;
  for (const auto& p : points) sum += p.confidence * p.confidence;
  return std::sqrt(sum / static_cast<double>(points.size()));
}

}  // namespace lanetrack
