#pragma once

// Cross-frame lane tracking.
//
// Each frame, detections are matched to stored lanes by RMS line distance
// gated at match_k sigma. Lane weights follow an exponentially weighted
// moving average without bias correction:
//
//   omega_f = psi * c_f * N_f
//   Omega_f = alpha * omega_f + (1 - alpha) * Omega_{f-1}
//
// Matched lanes merge their Hesse parameters with the detection using the
// weights Omega_{f-1}/sigma_{f-1} and omega_f/sigma_f. The heaviest lane on
// each half of the frame is the output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/geometry.hpp"
#include "lanetrack/lane_fit.hpp"

namespace lanetrack {

struct TrackerConfig {
  double alpha = 0.5;
  double psi_active = 2.0;
  double psi_nonactive = 1.0;
  double match_k = 2.0;
  std::optional<double> prune_weight;  // unset: 0.02 * psi_active
  double horizon_frac = 0.35;
  bool merge_enabled = true;

  double effective_prune_weight() const { return prune_weight.value_or(0.02 * psi_active); }

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]");
    if (!(psi_nonactive > 0.0)) throw ConfigError("psi_nonactive must be positive");
    if (!(psi_active >= psi_nonactive)) throw ConfigError("psi_active must be >= psi_nonactive");
    if (!(match_k >= 0.0)) throw ConfigError("match_k must be >= 0");
    if (!(effective_prune_weight() > 0.0)) throw ConfigError("prune_weight must be positive");
    if (!(horizon_frac >= 0.0 && horizon_frac < 1.0)) throw ConfigError("horizon_frac must be in [0,1)");
  }
};

struct TrackedLane {
  std::uint64_t id = 0;
  double r = 0.0;
  double theta = 0.0;
  double sigma = 1.0;
  double omega = 0.0;  // EWMA weight
  std::int64_t last_seen = 0;
  bool active = false;
  YSpan y_span;

  HesseLine hesse() const { return {r, theta}; }
  Line line() const { return to_line(hesse()); }

  friend bool operator==(const TrackedLane&, const TrackedLane&) = default;
};

struct FrameResult {
  std::int64_t frame = 0;
  std::optional<TrackedLane> left;
  std::optional<TrackedLane> right;
  std::vector<TrackedLane> all_lanes;

  friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

// Everything needed to resume a stream.
struct TrackerState {
  Canvas canvas;
  std::uint64_t next_id = 1;
  std::optional<std::int64_t> last_frame;
  std::vector<TrackedLane> lanes;  // ascending id

  friend bool operator==(const TrackerState&, const TrackerState&) = default;
};

inline double frame_weight(const DetectedLane& lane, bool active, const TrackerConfig& cfg) {
  const double psi = active ? cfg.psi_active : cfg.psi_nonactive;
  return psi * lane.rms_confidence * static_cast<double>(lane.point_count);
}

// EWMA update; a lane never seen before starts from zero (no bias correction).
inline double update_weight(double omega_f, std::optional<double> previous, double alpha) {
  return alpha * omega_f + (1.0 - alpha) * previous.value_or(0.0);
}

// Share of the merged parameters taken from the current detection.
inline double merge_ratio(double omega_f, double sigma_f, double omega_prev, double sigma_prev) {
  return omega_f * sigma_prev / (omega_f * sigma_prev + omega_prev * sigma_f);
}

struct MergeResult {
  HesseLine line;  // canonical
  double sigma = 0.0;
  double zeta = 0.0;
};

inline MergeResult merge_parameters(const HesseLine& detected, double sigma_f, double omega_f,
                                     const HesseLine& previous, double sigma_prev, double omega_prev) {
  const double zeta = merge_ratio(omega_f, sigma_f, omega_prev, sigma_prev);
  const HesseLine aligned = align_branch(previous, detected);
  // prev + zeta * (new - prev) is exact when both inputs agree
  const HesseLine merged{previous.r + zeta * (aligned.r - previous.r),
                         previous.theta + zeta * (aligned.theta - previous.theta)};
  return {canonical(merged), sigma_prev + zeta * (sigma_f - sigma_prev), zeta};
}

inline MergeResult merge(const DetectedLane& detected, double omega_f, const TrackedLane& tracked) {
  return merge_parameters(detected.fit.hesse, detected.sigma, omega_f, tracked.hesse(), tracked.sigma,
                          tracked.omega);
}

// Rows used to compare two lanes: their common span, or the band below the
// horizon when they do not overlap.
inline YSpan comparison_range(const YSpan& a, const YSpan& b, const Canvas& canvas, double horizon_frac) {
  if (auto common = intersect(a, b)) return *common;
  return {horizon_frac * canvas.height, canvas.height - 1.0};
}

inline double lane_distance(const DetectedLane& detected, const TrackedLane& tracked, const Canvas& canvas,
                            double horizon_frac) {
  const auto range = comparison_range(detected.fit.y_span, tracked.y_span, canvas, horizon_frac);
  return line_distance(detected.fit.line, tracked.line(), range);
}

// Greedy one-to-one association by ascending distance. Entry i holds the
// index into `tracked` matched to detections[i], if any.
inline std::vector<std::optional<std::size_t>> associate(std::span<const DetectedLane> detections,
                                                         std::span<const TrackedLane> tracked,
                                                         const TrackerConfig& cfg, const Canvas& canvas) {
  struct Candidate {
    double distance;
    std::size_t detection;
    std::size_t lane;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (!(detections[i].sigma > 0.0)) throw PreconditionError("detected lane sigma must be positive");
    for (std::size_t j = 0; j < tracked.size(); ++j) {
      const double d = lane_distance(detections[i], tracked[j], canvas, cfg.horizon_frac);
      const double gate = cfg.match_k * std::max(detections[i].sigma, tracked[j].sigma);
      if (d <= gate) candidates.push_back({d, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    return std::tie(a.distance, tracked[a.lane].id, a.detection) <
           std::tie(b.distance, tracked[b.lane].id, b.detection);
  });
  std::vector<std::optional<std::size_t>> result(detections.size());
  std::vector<bool> taken(tracked.size(), false);
  for (const auto& c : candidates) {
    if (result[c.detection] || taken[c.lane]) continue;
    result[c.detection] = c.lane;
    taken[c.lane] = true;
  }
  return result;
}

// Nearest gated lane for a single detection.
inline std::optional<std::size_t> match(const DetectedLane& detected, std::span<const TrackedLane> tracked,
                                        const TrackerConfig& cfg, const Canvas& canvas) {
  return associate(std::span<const DetectedLane>(&detected, 1), tracked, cfg, canvas).front();
}

// x where the line meets the bottom row.
inline double bottom_crossing(const Line& line, const Canvas& canvas) {
  return line.x_at(canvas.height - 1.0);
}

inline bool is_left(double bottom_x, const Canvas& canvas) { return bottom_x < canvas.width / 2.0; }

// Per detection: true when its bottom crossing is the nearest to the image
// centre on its side of the frame.
inline std::vector<bool> classify_active(std::span<const DetectedLane> detections, const Canvas& canvas) {
  const double centre = canvas.width / 2.0;
  std::optional<std::size_t> best_left, best_right;
  auto gap = [&](std::size_t i) { return std::abs(bottom_crossing(detections[i].fit.line, canvas) - centre); };
  for (std::size_t i = 0; i < detections.size(); ++i) {
    auto& best = is_left(bottom_crossing(detections[i].fit.line, canvas), canvas) ? best_left : best_right;
    if (!best || gap(i) < gap(*best)) best = i;
  }
  std::vector<bool> active(detections.size(), false);
  if (best_left) active[*best_left] = true;
  if (best_right) active[*best_right] = true;
  return active;
}

class Tracker {
 public:
  Tracker(Canvas canvas, TrackerConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (canvas.width < 2 || canvas.height < 2) throw PreconditionError("canvas must be at least 2x2");
    state_.canvas = canvas;
  }

  Tracker(TrackerState state, TrackerConfig cfg) : Tracker(state.canvas, std::move(cfg)) {
    state_ = std::move(state);
  }

  const TrackerState& state() const noexcept { return state_; }
  const TrackerConfig& config() const noexcept { return cfg_; }

  FrameResult step(std::int64_t frame, std::span<const DetectedLane> detections) {
    const auto& canvas = state_.canvas;
    const auto active = classify_active(detections, canvas);
    const auto matches = associate(detections, state_.lanes, cfg_, canvas);

    std::vector<bool> updated(state_.lanes.size(), false);
    std::vector<TrackedLane> born;
    for (std::size_t i = 0; i < detections.size(); ++i) {
      const auto& det = detections[i];
      const double omega_f = frame_weight(det, active[i], cfg_);
      if (const auto j = matches[i]) {
        auto& lane = state_.lanes[*j];
        if (cfg_.merge_enabled) {
          const auto merged = merge(det, omega_f, lane);
          lane.r = merged.line.r;
          lane.theta = merged.line.theta;
          lane.sigma = merged.sigma;
        } else {
          lane.r = det.fit.hesse.r;
          lane.theta = det.fit.hesse.theta;
          lane.sigma = det.sigma;
        }
        lane.omega = update_weight(omega_f, lane.omega, cfg_.alpha);
        lane.last_seen = frame;
        lane.active = active[i];
        lane.y_span = det.fit.y_span;
        updated[*j] = true;
      } else {
        TrackedLane lane;
        lane.id = state_.next_id++;
        lane.r = det.fit.hesse.r;
        lane.theta = det.fit.hesse.theta;
        lane.sigma = det.sigma;
        lane.omega = update_weight(omega_f, std::nullopt, cfg_.alpha);
        lane.last_seen = frame;
        lane.active = active[i];
        lane.y_span = det.fit.y_span;
        born.push_back(lane);
      }
    }
    for (std::size_t j = 0; j < state_.lanes.size(); ++j) {
      if (!updated[j]) state_.lanes[j].omega = update_weight(0.0, state_.lanes[j].omega, cfg_.alpha);
    }
    state_.lanes.insert(state_.lanes.end(), born.begin(), born.end());

    const double floor = cfg_.effective_prune_weight();
    std::erase_if(state_.lanes, [&](const TrackedLane& l) { return l.omega < floor; });
    state_.last_frame = frame;

    FrameResult result;
    result.frame = frame;
    result.all_lanes = state_.lanes;
    for (const auto& lane : state_.lanes) {
      const auto crossing = safe_bottom_crossing(lane);
      if (!crossing) continue;
      auto& slot = is_left(*crossing, canvas) ? result.left : result.right;
      // lanes are in ascending id order, so strict > keeps the older lane on ties
      if (!slot || lane.omega > slot->omega) slot = lane;
    }
    return result;
  }

 private:
  std::optional<double> safe_bottom_crossing(const TrackedLane& lane) const {
    if (std::abs(std::cos(lane.theta)) < 1e-12) return std::nullopt;
    return bottom_crossing(lane.line(), state_.canvas);
  }

  TrackerConfig cfg_;
  TrackerState state_;
};

}  // namespace lanetrack
