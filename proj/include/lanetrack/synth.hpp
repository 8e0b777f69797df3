#pragma once

// Synthetic probability-map sequences with known ground truth. Each visible
// lane contributes a Gaussian cross-section per row,
//   peak * exp(-(x - x_centre)^2 / (2 sigma^2)),
// combined across lanes by per-pixel max. Noise and row dropouts come from a
// counter-based generator keyed on (seed, frame), so any frame can be
// rendered on its own and always comes out the same.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/evaluator.hpp"
#include "lanetrack/geometry.hpp"
#include "lanetrack/probmap.hpp"

namespace lanetrack {

struct LaneKeyframe {
  std::int64_t frame = 0;
  double slope = 0.0;
  double intercept = 0.0;

  friend bool operator==(const LaneKeyframe&, const LaneKeyframe&) = default;
};

struct ScriptedLane {
  std::string name;
  std::uint32_t channel = 0;
  double sigma = 3.0;  // px, horizontal cross-section
  double peak = 0.9;
  double y_top = 0.0;  // first row the marking covers
  std::int64_t appear = 0;
  std::optional<std::int64_t> disappear;  // exclusive
  bool ground_truth = true;
  // Centreline x = slope*y + intercept, interpolated linearly between
  // keyframes and held constant outside them.
  std::vector<LaneKeyframe> keyframes;

  bool visible(std::int64_t frame) const { return frame >= appear && (!disappear || frame < *disappear); }

  Line centreline(std::int64_t frame) const {
    if (frame <= keyframes.front().frame) return {keyframes.front().slope, keyframes.front().intercept};
    if (frame >= keyframes.back().frame) return {keyframes.back().slope, keyframes.back().intercept};
    const auto next = std::upper_bound(keyframes.begin(), keyframes.end(), frame,
                                       [](std::int64_t f, const LaneKeyframe& k) { return f < k.frame; });
    const auto prev = std::prev(next);
    const double t = static_cast<double>(frame - prev->frame) / static_cast<double>(next->frame - prev->frame);
    return {prev->slope + t * (next->slope - prev->slope), prev->intercept + t * (next->intercept - prev->intercept)};
  }

  friend bool operator==(const ScriptedLane&, const ScriptedLane&) = default;
};

struct Scenario {
  std::int64_t frames = 1;
  Canvas canvas{800, 288};
  std::uint32_t channels = 1;
  double noise = 0.0;    // additive uniform amplitude
  double dropout = 0.0;  // per-row probability that a lane contributes nothing
  std::uint64_t seed = 0;
  std::vector<ScriptedLane> lanes;

  void validate() const {
    if (frames < 1) throw ConfigError("scenario needs at least one frame");
    if (canvas.width < 2 || canvas.height < 2) throw ConfigError("scenario canvas must be at least 2x2");
    if (channels < 1) throw ConfigError("scenario needs at least one channel");
    if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise must be in [0,1]");
    if (!(dropout >= 0.0 && dropout <= 1.0)) throw ConfigError("dropout must be in [0,1]");
    for (const auto& l : lanes) {
      const std::string who = "lane '" + l.name + "': ";
      if (l.channel >= channels) throw ConfigError(who + "channel out of range");
      if (!(l.sigma > 0.0)) throw ConfigError(who + "sigma must be positive");
      if (!(l.peak > 0.0 && l.peak <= 1.0)) throw ConfigError(who + "peak must be in (0,1]");
      if (l.keyframes.empty()) throw ConfigError(who + "needs at least one keyframe");
      for (std::size_t i = 1; i < l.keyframes.size(); ++i) {
        if (l.keyframes[i].frame <= l.keyframes[i - 1].frame) {
          throw ConfigError(who + "keyframes must have increasing frame numbers");
        }
      }
    }
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct RenderedFrame {
  ProbabilityMap map;
  std::vector<LanePolyline> ground_truth;
};

// splitmix64; portable, so renders match across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Ground-truth polyline: scripted centreline every 10 rows from the bottom
// row up to the lane's top row.
inline std::optional<LanePolyline> scripted_polyline(const ScriptedLane& lane, std::int64_t frame,
                                                     const Canvas& canvas) {
  const Line line = lane.centreline(frame);
  const double top = std::clamp(lane.y_top, 0.0, canvas.height - 1.0);
  LanePolyline poly;
  auto add = [&](double y) {
    const double x = line.x_at(y);
    if (x >= 0.0 && x <= canvas.width - 1.0) poly.points.push_back({x, y});
  };
  for (double y = canvas.height - 1.0; y > top; y -= 10.0) add(y);
  add(top);
  if (poly.points.size() < 2) return std::nullopt;
  return poly;
}

inline RenderedFrame render(const Scenario& scenario, std::int64_t frame) {
  if (frame < 0 || frame >= scenario.frames) throw RangeError("frame outside scenario");
  const auto [width, height] = scenario.canvas;
  ProbabilityMap map(width, height, scenario.channels);
  SplitMix64 rng(scenario.seed ^ (0xD1B54A32D192ED03ull * static_cast<std::uint64_t>(frame + 1)));

  RenderedFrame out;
  for (const auto& lane : scenario.lanes) {
    if (!lane.visible(frame)) continue;
    const Line line = lane.centreline(frame);
    const double reach = 6.0 * lane.sigma;
    const auto first_row = static_cast<std::uint32_t>(std::clamp(std::ceil(lane.y_top), 0.0, height - 1.0));
    for (std::uint32_t y = first_row; y < height; ++y) {
      if (scenario.dropout > 0.0 && rng.uniform() < scenario.dropout) continue;
      const double xc = line.x_at(y);
      const auto x0 = static_cast<std::int64_t>(std::max(0.0, std::floor(xc - reach)));
      const auto x1 = static_cast<std::int64_t>(std::min(width - 1.0, std::ceil(xc + reach)));
      for (std::int64_t x = x0; x <= x1; ++x) {
        const double d = (static_cast<double>(x) - xc) / lane.sigma;
        const auto v = static_cast<float>(lane.peak * std::exp(-0.5 * d * d));
        float& cell = map.at(lane.channel, static_cast<std::uint32_t>(x), y);
        cell = std::max(cell, v);
      }
    }
    if (lane.ground_truth) {
      if (auto poly = scripted_polyline(lane, frame, scenario.canvas)) out.ground_truth.push_back(std::move(*poly));
    }
  }
  if (scenario.noise > 0.0) {
    for (std::uint32_t c = 0; c < scenario.channels; ++c) {
      for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
          float& cell = map.at(c, x, y);
          const double v = cell + scenario.noise * (2.0 * rng.uniform() - 1.0);
          cell = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
    }
  }
  out.map = std::move(map);
  return out;
}

}  // namespace lanetrack
