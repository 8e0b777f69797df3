#pragma once

// Lane text files (one lane per line, "x1 y1 x2 y2 ...") and frame
// directories whose file names start with a zero-padded frame index.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/evaluator.hpp"
#include "lanetrack/tracker.hpp"

namespace lanetrack {

inline constexpr const char* kLaneFileSuffix = ".lines.txt";

inline std::vector<LanePolyline> parse_lanes(std::istream& in) {
  std::vector<LanePolyline> lanes;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw FormatError("lane file: bad number '" + token + "'", line_offset);
      }
    }
    if (values.empty()) continue;
    if (values.size() % 2 != 0) throw FormatError("lane file: odd coordinate count", line_offset);
    LanePolyline lane;
    for (std::size_t i = 0; i < values.size(); i += 2) lane.points.push_back({values[i], values[i + 1]});
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

inline std::vector<LanePolyline> load_lanes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_lanes(in);
}

inline std::string format_lanes(const std::vector<LanePolyline>& lanes) {
  std::string out;
  char buf[64];
  for (const auto& lane : lanes) {
    for (std::size_t i = 0; i < lane.points.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.3f %.3f", i ? " " : "", lane.points[i].x, lane.points[i].y);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline void save_lanes(const std::vector<LanePolyline>& lanes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << format_lanes(lanes);
}

// Leading decimal digits of a file name, if any.
inline std::optional<std::int64_t> frame_index(const std::filesystem::path& path) {
  const auto name = path.filename().string();
  std::size_t n = 0;
  while (n < name.size() && std::isdigit(static_cast<unsigned char>(name[n]))) ++n;
  if (n == 0 || n > 18) return std::nullopt;
  return std::stoll(name.substr(0, n));
}

inline std::string frame_name(std::int64_t frame, const std::string& suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frame));
  return buf + suffix;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Files in `dir` whose names end in `suffix`, grouped by frame index.
inline std::map<std::int64_t, std::vector<std::filesystem::path>> list_frames(const std::filesystem::path& dir,
                                                                            const std::string& suffix) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::map<std::int64_t, std::vector<std::filesystem::path>> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (!ends_with(name, suffix)) continue;
    if (auto idx = frame_index(entry.path())) frames[*idx].push_back(entry.path());
  }
  for (auto& [idx, paths] : frames) std::sort(paths.begin(), paths.end());
  return frames;
}

inline FrameLanes load_lane_dir(const std::filesystem::path& dir) {
  FrameLanes out;
  for (const auto& [idx, paths] : list_frames(dir, kLaneFileSuffix)) {
    auto& lanes = out[idx];
    for (const auto& p : paths) {
      auto more = load_lanes(p);
      lanes.insert(lanes.end(), more.begin(), more.end());
    }
  }
  return out;
}

// Tracked lane drawn as a polyline every `row_step` rows over its span,
// bottom row first. Points outside the canvas are dropped.
inline std::optional<LanePolyline> lane_polyline(const TrackedLane& lane, const Canvas& canvas,
                                                 double row_step = 10.0) {
  Line line;
  try {
    line = lane.line();
  } catch (const FitError&) {
    return std::nullopt;
  }
  LanePolyline poly;
  auto add = [&](double y) {
    const double x = line.x_at(y);
    if (x >= 0.0 && x <= canvas.width - 1.0 && y >= 0.0 && y <= canvas.height - 1.0) poly.points.push_back({x, y});
  };
  for (double y = lane.y_span.max; y > lane.y_span.min; y -= row_step) add(y);
  add(lane.y_span.min);
  if (poly.points.size() < 2) return std::nullopt;
  return poly;
}

inline std::string format_report_csv(const AccuracyReport& report) {
  std::string out = "threshold,n_tp,n_gt,accuracy\n";
  char buf[128];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.2f,%zu,%zu,%.6f\n", row.threshold, row.n_tp, row.n_gt, row.accuracy);
    out += buf;
  }
  return out;
}

}  // namespace lanetrack
