#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's numerical routines.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace lanetrack::oracle {

struct WeightedPoint {
  double x, y, w;
};

// Weighted least squares of x on y by solving the raw 2x2 normal equations
//   [sum w y^2  sum w y] [m]   [sum w x y]
//   [sum w y    sum w  ] [b] = [sum w x  ]
// with Cramer's rule.
inline std::pair<double, double> normal_equations_fit(const std::vector<WeightedPoint>& pts) {
  long double syy = 0, sy = 0, sw = 0, sxy = 0, sx = 0;
  for (const auto& p : pts) {
    syy += p.w * p.y * p.y;
    sy += p.w * p.y;
    sw += p.w;
    sxy += p.w * p.x * p.y;
    sx += p.w * p.x;
  }
  const long double det = syy * sw - sy * sy;
  const long double m = (sxy * sw - sy * sx) / det;
  const long double b = (syy * sx - sy * sxy) / det;
  return {static_cast<double>(m), static_cast<double>(b)};
}

// Weighted sum of squared residuals of x = m y + b.
inline double weighted_sse(const std::vector<WeightedPoint>& pts, double m, double b) {
  long double s = 0;
  for (const auto& p : pts) {
    const long double r = p.x - (m * p.y + b);
    s += p.w * r * r;
  }
  return static_cast<double>(s);
}

namespace detail {
inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol * std::max(1.0, std::abs(whole))) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature; tol is relative to the magnitude of the integral.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson(a, b, fa, fm, fb), tol, 24);
}

// RMS horizontal gap of two lines x = m y + b over [y0, y1] by quadrature.
inline double rms_gap_quadrature(double m1, double b1, double m2, double b2, double y0, double y1) {
  const auto gap2 = [&](double y) {
    const double d = (m1 * y + b1) - (m2 * y + b2);
    return d * d;
  };
  return std::sqrt(integrate(gap2, y0, y1) / (y1 - y0));
}

}  // namespace lanetrack::oracle
