#pragma once

// IoU-based lane accuracy. Lanes are drawn as thick polylines (16 px for
// ground truth, 30 px for predictions at an 800 px wide canvas, scaled with
// canvas width); a prediction is a true positive at threshold t when its
// IoU with the ground-truth lane it is assigned to is >= t.
// accuracy = N_TP / N_gt.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/types.hpp"

namespace lanetrack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct LanePolyline {
  std::vector<Point2> points;

  friend bool operator==(const LanePolyline&, const LanePolyline&) = default;
};

inline constexpr double kGroundTruthWidth = 16.0;
inline constexpr double kPredictionWidth = 30.0;
inline constexpr double kReferenceCanvasWidth = 800.0;

class Mask {
 public:
  Mask(std::uint32_t width, std::uint32_t height)
      : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  bool get(std::uint32_t x, std::uint32_t y) const { return bits_[y * static_cast<std::size_t>(width_) + x] != 0; }
  void set(std::uint32_t x, std::uint32_t y) { bits_[y * static_cast<std::size_t>(width_) + x] = 1; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::size_t intersection(const Mask& other) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) n += bits_[i] & other.bits_[i];
    return n;
  }

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

inline void draw_segment(Mask& mask, Point2 a, Point2 b, double radius) {
  const auto lo_x = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x) - radius));
  const auto hi_x = static_cast<std::int64_t>(std::ceil(std::max(a.x, b.x) + radius));
  const auto lo_y = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y) - radius));
  const auto hi_y = static_cast<std::int64_t>(std::ceil(std::max(a.y, b.y) + radius));
  const std::int64_t x0 = std::max<std::int64_t>(lo_x, 0);
  const std::int64_t x1 = std::min<std::int64_t>(hi_x, mask.width() - 1);
  const std::int64_t y0 = std::max<std::int64_t>(lo_y, 0);
  const std::int64_t y1 = std::min<std::int64_t>(hi_y, mask.height() - 1);
  for (std::int64_t y = y0; y <= y1; ++y) {
    for (std::int64_t x = x0; x <= x1; ++x) {
      if (segment_distance({x + 0.5, y + 0.5}, a, b) <= radius) {
        mask.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
      }
    }
  }
}

}  // namespace detail

// Thick polyline with round caps and joins. width_px is the nominal width at
// an 800 px canvas. Pixel (i, j) is the unit square [i, i+1) x [j, j+1) and
// is set when its centre lies within width/2 of the polyline.
inline Mask rasterize(const LanePolyline& polyline, double width_px, const Canvas& canvas) {
  if (!(width_px > 0.0)) throw PreconditionError("line width must be positive");
  Mask mask(canvas.width, canvas.height);
  const double radius = 0.5 * width_px * canvas.width / kReferenceCanvasWidth;
  const auto& pts = polyline.points;
  if (pts.size() == 1) {
    detail::draw_segment(mask, pts[0], pts[0], radius);
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    detail::draw_segment(mask, pts[i - 1], pts[i], radius);
  }
  return mask;
}

inline double mask_iou(const Mask& a, const Mask& b) {
  const std::size_t inter = a.intersection(b);
  const std::size_t uni = a.count() + b.count() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double lane_iou(const LanePolyline& gt, const LanePolyline& pred, const Canvas& canvas) {
  return mask_iou(rasterize(gt, kGroundTruthWidth, canvas), rasterize(pred, kPredictionWidth, canvas));
}

// Lanes of one frame, keyed by frame index.
using FrameLanes = std::map<std::int64_t, std::vector<LanePolyline>>;

struct AccuracyRow {
  double threshold = 0.0;
  std::size_t n_tp = 0;
  std::size_t n_gt = 0;
  double accuracy = 0.0;
};

struct AccuracyReport {
  std::vector<AccuracyRow> rows;
  std::vector<std::string> warnings;
};

// One-to-one assignment by descending IoU. Returns the IoU assigned to each
// ground-truth lane (0 when unassigned).
inline std::vector<double> assign_lanes(const std::vector<LanePolyline>& gt,
                                        const std::vector<LanePolyline>& pred, const Canvas& canvas) {
  std::vector<Mask> gt_masks, pred_masks;
  for (const auto& g : gt) gt_masks.push_back(rasterize(g, kGroundTruthWidth, canvas));
  for (const auto& p : pred) pred_masks.push_back(rasterize(p, kPredictionWidth, canvas));

  struct Pair {
    double iou;
    std::size_t g, p;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double iou = mask_iou(gt_masks[g], pred_masks[p]);
      if (iou > 0.0) pairs.push_back({iou, g, p});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.iou > b.iou; });
  std::vector<double> assigned(gt.size(), 0.0);
  std::vector<bool> gt_used(gt.size(), false), pred_used(pred.size(), false);
  for (const auto& pr : pairs) {
    if (gt_used[pr.g] || pred_used[pr.p]) continue;
    gt_used[pr.g] = pred_used[pr.p] = true;
    assigned[pr.g] = pr.iou;
  }
  return assigned;
}

inline AccuracyReport accuracy(const FrameLanes& gt_set, const FrameLanes& pred_set,
                               const std::vector<double>& thresholds, const Canvas& canvas) {
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw PreconditionError("IoU thresholds must be in (0,1)");
  }
  AccuracyReport report;
  std::vector<std::size_t> tp(thresholds.size(), 0);
  std::size_t n_gt = 0;
  for (const auto& [frame, lanes] : pred_set) {
    if (!gt_set.contains(frame)) {
      report.warnings.push_back("prediction for frame " + std::to_string(frame) + " has no ground truth");
    }
  }
  static const std::vector<LanePolyline> none;
  for (const auto& [frame, gt] : gt_set) {
    const auto it = pred_set.find(frame);
    const auto& pred = it == pred_set.end() ? none : it->second;
    n_gt += gt.size();
    const auto assigned = assign_lanes(gt, pred, canvas);
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      tp[k] += static_cast<std::size_t>(
          std::count_if(assigned.begin(), assigned.end(), [&](double iou) { return iou >= thresholds[k]; }));
    }
  }
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    report.rows.push_back({thresholds[k], tp[k], n_gt,
                           n_gt == 0 ? 0.0 : static_cast<double>(tp[k]) / static_cast<double>(n_gt)});
  }
  return report;
}

}  // namespace lanetrack
