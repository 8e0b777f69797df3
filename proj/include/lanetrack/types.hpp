#pragma once

#include <cstdint>
#include <vector>

namespace lanetrack {

// Candidate lane point before its positional spread is known.
struct RawPoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  friend bool operator==(const RawPoint&, const RawPoint&) = default;
};

struct RawLanePoints {
  std::uint32_t channel = 0;
  std::vector<RawPoint> points;  // strictly increasing y
};

// Lane point with its positional standard deviation (pixels) along the normal.
struct LanePoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;
  double sigma = 1.0;

  friend bool operator==(const LanePoint&, const LanePoint&) = default;
};

struct Direction {
  double dx = 1.0;
  double dy = 0.0;
};

// Image dimensions in pixels.
struct Canvas {
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  friend bool operator==(const Canvas&, const Canvas&) = default;
};

// Range of image rows covered by a lane.
struct YSpan {
  double min = 0.0;
  double max = 0.0;

  double length() const noexcept { return max - min; }
  friend bool operator==(const YSpan&, const YSpan&) = default;
};

}  // namespace lanetrack
