#pragma once

// Fixtures shared by the test binaries.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lanetrack/lane_fit.hpp"
#include "lanetrack/synth.hpp"

namespace lanetrack::testing {

// A detection on x = m y + b with prescribed summary statistics.
inline DetectedLane detection(double m, double b, double sigma, double c = 1.0, std::size_t n = 10,
                              YSpan span = {120.0, 287.0}, std::uint32_t channel = 0) {
  DetectedLane d;
  d.channel = channel;
  d.fit.line = {m, b};
  d.fit.hesse = to_hesse(d.fit.line);
  d.fit.y_span = span;
  d.rms_confidence = c;
  d.point_count = n;
  d.sigma = sigma;
  return d;
}

inline ScriptedLane straight_lane(double slope, double intercept, double sigma = 3.0, double peak = 0.9,
                                  std::uint32_t channel = 0) {
  ScriptedLane lane;
  lane.name = "lane" + std::to_string(channel);
  lane.channel = channel;
  lane.sigma = sigma;
  lane.peak = peak;
  lane.keyframes = {{0, slope, intercept}};
  return lane;
}

inline Scenario one_lane_scenario(double slope, double intercept, double sigma = 3.0, double peak = 0.9,
                                  Canvas canvas = {800, 288}) {
  Scenario s;
  s.canvas = canvas;
  s.lanes = {straight_lane(slope, intercept, sigma, peak)};
  return s;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lanetrack_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lanetrack::testing
