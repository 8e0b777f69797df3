#pragma once

// Straight lane lines. Lanes are near-vertical in image space, so lines are
// written x = slope * y + intercept, and alternatively in Hesse normal form
// x cos(theta) + y sin(theta) = r.

#include <cmath>
#include <numbers>
#include <optional>
#include <algorithm>

#include "lanetrack/errors.hpp"
#include "lanetrack/types.hpp"

namespace lanetrack {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;

  double x_at(double y) const noexcept { return slope * y + intercept; }
  friend bool operator==(const Line&, const Line&) = default;
};

struct HesseLine {
  double r = 0.0;
  double theta = 0.0;

  friend bool operator==(const HesseLine&, const HesseLine&) = default;
};

// Canonical form: r >= 0, theta in [0, 2pi); theta in [0, pi) when r == 0.
inline HesseLine canonical(HesseLine h) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (h.r < 0.0) {
    h.r = -h.r;
    h.theta += std::numbers::pi;
  }
  h.theta = std::fmod(h.theta, two_pi);
  if (h.theta < 0.0) h.theta += two_pi;
  if (h.theta >= two_pi) h.theta -= two_pi;
  if (h.r == 0.0 && h.theta >= std::numbers::pi) h.theta -= std::numbers::pi;
  return h;
}

inline HesseLine to_hesse(const Line& line) {
  // x - m*y - b = 0, unit normal (1, -m)/s.
  const double s = std::hypot(1.0, line.slope);
  return canonical({line.intercept / s, std::atan2(-line.slope, 1.0)});
}

// Throws FitError for horizontal lines, which have no x = f(y) form.
inline Line to_line(const HesseLine& h) {
  const double c = std::cos(h.theta);
  if (std::abs(c) < 1e-12) {
    throw FitError("horizontal line has no slope-intercept form in x(y)");
  }
  return {-std::tan(h.theta), h.r / c};
}

// Re-expresses `b` as the equivalent (+-r, theta + k*pi) whose theta lies
// nearest a.theta, so that a and b can be averaged component-wise.
inline HesseLine align_branch(const HesseLine& a, const HesseLine& b) {
  const double k = std::round((a.theta - b.theta) / std::numbers::pi);
  HesseLine out{b.r, b.theta + k * std::numbers::pi};
  if (static_cast<long long>(k) % 2 != 0) out.r = -out.r;
  return out;
}

// RMS horizontal gap between two lines over rows [y0, y1], in closed form:
//   sqrt( (1/(y1-y0)) * integral (dm*y + db)^2 dy )
inline double line_distance(const Line& a, const Line& b, double y0, double y1) {
  if (!(y1 > y0)) {
    throw RangeError("line_distance needs y1 > y0");
  }
  const double dm = a.slope - b.slope;
  const double db = a.intercept - b.intercept;
  const double mean_sq =
      dm * dm * (y1 * y1 + y1 * y0 + y0 * y0) / 3.0 + dm * db * (y1 + y0) + db * db;
  return std::sqrt(std::max(mean_sq, 0.0));
}

inline double line_distance(const Line& a, const Line& b, const YSpan& range) {
  return line_distance(a, b, range.min, range.max);
}

// Unit normal to the line, pointing towards +x.
inline Direction unit_normal(const Line& line) {
  const double s = std::hypot(1.0, line.slope);
  return {1.0 / s, -line.slope / s};
}

// Overlap of two spans, if it has positive length.
inline std::optional<YSpan> intersect(const YSpan& a, const YSpan& b) {
  const YSpan s{std::max(a.min, b.min), std::min(a.max, b.max)};
  if (s.max > s.min) return s;
  return std::nullopt;
}

}  // namespace lanetrack
