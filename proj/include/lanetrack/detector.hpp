#pragma once

// Per-frame lane detection from a probability map: point extraction,
// per-point sigma, and the sigma-aware weighted fit.

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "lanetrack/lane_fit.hpp"
#include "lanetrack/point_extractor.hpp"
#include "lanetrack/probmap.hpp"
#include "lanetrack/variance.hpp"

namespace lanetrack {

struct DetectionConfig {
  ExtractionConfig extraction;
  VarianceConfig variance;
  std::size_t min_points = 3;
};

// Wall-clock time spent per stage, accumulated across calls.
struct StageTimes {
  using duration = std::chrono::duration<double, std::milli>;
  duration extraction{0};
  duration variance{0};
  duration fit{0};
  duration track{0};

  duration total() const { return extraction + variance + fit + track; }
};

namespace detail {

class ScopedStage {
 public:
  ScopedStage(StageTimes::duration* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~ScopedStage() {
    if (sink_) *sink_ += std::chrono::steady_clock::now() - start_;
  }
  ScopedStage(const ScopedStage&) = delete;
  ScopedStage& operator=(const ScopedStage&) = delete;

 private:
  StageTimes::duration* sink_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Attaches sigma to each raw point, measured along the normal of a
// confidence-weighted fit of the points.
inline std::vector<LanePoint> estimate_sigmas(const ProbabilityMap& map, const RawLanePoints& raw,
                                              const VarianceConfig& cfg) {
  const auto guide = fit_confidence_weighted(std::span<const RawPoint>(raw.points));
  const Direction normal = unit_normal(guide.line);
  std::vector<LanePoint> points;
  points.reserve(raw.points.size());
  for (const auto& p : raw.points) {
    points.push_back({p.x, p.y, p.confidence, estimate_point_sigma(map, raw.channel, p, normal, cfg)});
  }
  return points;
}

inline DetectedLane make_detected_lane(std::uint32_t channel, std::vector<LanePoint> points) {
  DetectedLane lane;
  lane.channel = channel;
  lane.fit = fit_weighted(points);
  lane.rms_confidence = rms_confidence(points);
  lane.point_count = points.size();
  lane.sigma = lane_sigma(points);
  lane.points = std::move(points);
  return lane;
}

inline std::optional<DetectedLane> detect_lane(const ProbabilityMap& map, std::uint32_t channel,
                                               const DetectionConfig& cfg, StageTimes* times = nullptr) {
  RawLanePoints raw;
  {
    detail::ScopedStage stage(times ? &times->extraction : nullptr);
    raw = extract_points(map, channel, cfg.extraction);
  }
  if (raw.points.size() < std::max<std::size_t>(cfg.min_points, 2)) return std::nullopt;

  std::vector<LanePoint> points;
  {
    detail::ScopedStage stage(times ? &times->variance : nullptr);
    points = estimate_sigmas(map, raw, cfg.variance);
  }
  detail::ScopedStage stage(times ? &times->fit : nullptr);
  return make_detected_lane(channel, std::move(points));
}

// One detection per channel that holds enough points, in channel order.
inline std::vector<DetectedLane> detect_lanes(const ProbabilityMap& map, const DetectionConfig& cfg,
                                              StageTimes* times = nullptr) {
  std::vector<DetectedLane> lanes;
  for (std::uint32_t c = 0; c < map.channels(); ++c) {
    if (auto lane = detect_lane(map, c, cfg, times)) lanes.push_back(std::move(*lane));
  }
  return lanes;
}

}  // namespace lanetrack
