#pragma once

// The track / eval / synth / bench workflows behind the command-line tool.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lanetrack/config.hpp"
#include "lanetrack/detector.hpp"
#include "lanetrack/evaluator.hpp"
#include "lanetrack/lane_io.hpp"
#include "lanetrack/probmap.hpp"
#include "lanetrack/scenario_io.hpp"
#include "lanetrack/synth.hpp"
#include "lanetrack/tracker.hpp"
#include "lanetrack/tracker_io.hpp"

namespace lanetrack {

inline constexpr const char* kRasterSuffix = ".lpm";
inline constexpr const char* kPgmSuffix = ".pgm";

// Frame files of an input directory: either one .lpm per frame, or one or
// more .pgm per frame (one per channel, in file-name order).
inline std::map<std::int64_t, std::vector<std::filesystem::path>> list_map_frames(const std::filesystem::path& dir) {
  auto frames = list_frames(dir, kRasterSuffix);
  for (auto& [idx, paths] : list_frames(dir, kPgmSuffix)) {
    if (frames.contains(idx)) throw FormatError("frame " + std::to_string(idx) + " has both .lpm and .pgm files");
    frames[idx] = std::move(paths);
  }
  for (const auto& [idx, paths] : frames) {
    if (paths.front().extension() == kRasterSuffix && paths.size() != 1) {
      throw FormatError("frame " + std::to_string(idx) + " has more than one .lpm file");
    }
  }
  return frames;
}

// Tracking needs an unbroken stream.
inline void require_contiguous(const std::map<std::int64_t, std::vector<std::filesystem::path>>& frames) {
  std::int64_t expected = frames.empty() ? 0 : frames.begin()->first;
  for (const auto& [idx, paths] : frames) {
    if (idx != expected) throw FormatError("missing frame index " + std::to_string(expected));
    ++expected;
  }
}

inline ProbabilityMap load_frame(const std::vector<std::filesystem::path>& paths) {
  if (paths.size() == 1) return load_map(paths.front());
  return load_pgm_channels(paths);
}

// Selected lanes of one frame as polylines, left first.
inline std::vector<LanePolyline> frame_predictions(const FrameResult& result, const Canvas& canvas) {
  std::vector<LanePolyline> out;
  for (const auto* lane : {&result.left, &result.right}) {
    if (!*lane) continue;
    if (auto poly = lane_polyline(**lane, canvas)) out.push_back(std::move(*poly));
  }
  return out;
}

// Runs detection and tracking over maps in frame order.
class LanePipeline {
 public:
  LanePipeline(Canvas canvas, const RunConfig& cfg) : cfg_(cfg), tracker_(canvas, cfg.tracker) {}
  LanePipeline(TrackerState state, const RunConfig& cfg) : cfg_(cfg), tracker_(std::move(state), cfg.tracker) {}

  FrameResult process(std::int64_t frame, const ProbabilityMap& map, StageTimes* times = nullptr) {
    const Canvas& canvas = tracker_.state().canvas;
    if (map.width() != canvas.width || map.height() != canvas.height) {
      throw FormatError("frame " + std::to_string(frame) + " size differs from the stream's first frame");
    }
    const auto detections = detect_lanes(map, cfg_.detection, times);
    detail::ScopedStage stage(times ? &times->track : nullptr);
    return tracker_.step(frame, detections);
  }

  const Tracker& tracker() const noexcept { return tracker_; }

 private:
  RunConfig cfg_;
  Tracker tracker_;
};

struct TrackSummary {
  std::size_t frames = 0;
};

inline TrackSummary run_track(const std::filesystem::path& input, const std::filesystem::path& output,
                              const RunConfig& cfg) {
  const auto frames = list_map_frames(input);
  require_contiguous(frames);
  std::filesystem::create_directories(output);
  std::optional<LanePipeline> pipeline;
  if (!cfg.resume.empty()) pipeline.emplace(load_tracker_state(cfg.resume), cfg);
  TrackSummary summary;
  for (const auto& [idx, paths] : frames) {
    const auto map = load_frame(paths);
    if (!pipeline) pipeline.emplace(Canvas{map.width(), map.height()}, cfg);
    const auto result = pipeline->process(idx, map);
    save_lanes(frame_predictions(result, pipeline->tracker().state().canvas),
               output / frame_name(idx, kLaneFileSuffix));
    ++summary.frames;
  }
  if (!cfg.checkpoint.empty() && pipeline) save_tracker_state(pipeline->tracker().state(), cfg.checkpoint);
  return summary;
}

inline FrameLanes scale_lanes(FrameLanes lanes, double factor) {
  for (auto& [idx, polys] : lanes) {
    for (auto& poly : polys) {
      for (auto& p : poly.points) {
        p.x *= factor;
        p.y *= factor;
      }
    }
  }
  return lanes;
}

inline AccuracyReport run_eval(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir,
                               const RunConfig& cfg) {
  auto gt = load_lane_dir(gt_dir);
  if (cfg.gt_image_width > 0) gt = scale_lanes(std::move(gt), static_cast<double>(cfg.canvas.width) / cfg.gt_image_width);
  const auto pred = load_lane_dir(pred_dir);
  auto report = accuracy(gt, pred, cfg.thresholds, cfg.canvas);
  for (const auto& [idx, lanes] : gt) {
    if (!pred.contains(idx)) report.warnings.push_back("no prediction for frame " + std::to_string(idx));
  }
  return report;
}

// Renders every frame as <idx>.lpm plus <idx>.lines.txt ground truth.
inline void run_synth(const Scenario& scenario, const std::filesystem::path& output) {
  scenario.validate();
  std::filesystem::create_directories(output);
  for (std::int64_t f = 0; f < scenario.frames; ++f) {
    const auto frame = render(scenario, f);
    save_map(frame.map, output / frame_name(f, kRasterSuffix));
    save_lanes(frame.ground_truth, output / frame_name(f, kLaneFileSuffix));
  }
}

struct StageStats {
  std::string stage;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t frames = 0;
};

// Nearest-rank percentile.
inline double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * samples.size()));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

// Per-frame timings of each stage over `reps` passes of the stream. Maps are
// loaded once up front, so I/O is excluded.
inline std::vector<StageStats> run_bench(const std::vector<ProbabilityMap>& maps, const RunConfig& cfg,
                                         std::uint32_t reps) {
  std::vector<double> extraction, variance, fit, track, total;
  for (std::uint32_t rep = 0; rep < reps; ++rep) {
    if (maps.empty()) break;
    LanePipeline pipeline(Canvas{maps.front().width(), maps.front().height()}, cfg);
    for (std::size_t i = 0; i < maps.size(); ++i) {
      StageTimes t;
      pipeline.process(static_cast<std::int64_t>(i), maps[i], &t);
      extraction.push_back(t.extraction.count());
      variance.push_back(t.variance.count());
      fit.push_back(t.fit.count());
      track.push_back(t.track.count());
      total.push_back(t.total().count());
    }
  }
  auto stats = [](std::string name, const std::vector<double>& s) {
    double sum = 0.0;
    for (double v : s) sum += v;
    return StageStats{std::move(name), s.empty() ? 0.0 : sum / s.size(), percentile(s, 95.0), s.size()};
  };
  return {stats("extraction", extraction), stats("variance", variance), stats("fit", fit), stats("track", track),
          stats("total", total)};
}

inline std::string format_bench_csv(const std::vector<StageStats>& stats) {
  std::string out = "stage,mean_ms,p95_ms,frames\n";
  char buf[160];
  for (const auto& s : stats) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%zu\n", s.stage.c_str(), s.mean_ms, s.p95_ms, s.frames);
    out += buf;
  }
  return out;
}

}  // namespace lanetrack
