#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lanetrack/evaluator.hpp"
#include "lanetrack/lane_io.hpp"

using namespace lanetrack;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Canvas kCanvas{800, 288};

LanePolyline vertical(double x, double y0, double y1) { return {{{x, y1}, {x, y0}}}; }

// Brute force: every pixel whose centre (x + 0.5, y + 0.5) is within `radius` of the segment.
std::size_t covered_pixels(Point2 a, Point2 b, double radius, const Canvas& canvas) {
  std::size_t n = 0;
  for (std::uint32_t y = 0; y < canvas.height; ++y) {
    for (std::uint32_t x = 0; x < canvas.width; ++x) {
      const double vx = b.x - a.x, vy = b.y - a.y;
      const double len2 = vx * vx + vy * vy;
      const double px = x + 0.5, py = y + 0.5;
      double t = len2 > 0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
      t = std::min(1.0, std::max(0.0, t));
      const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
      if (dx * dx + dy * dy <= radius * radius) ++n;
    }
  }
  return n;
}

}  // namespace

TEST(Rasterize, AxisAlignedAreaMatchesAnalytic) {
  for (double len : {50.0, 100.0, 180.0}) {
    const auto mask = rasterize(vertical(400, 50, 50 + len), 16.0, kCanvas);
    const double analytic = 16.0 * len + kPi * 64.0;
    EXPECT_NEAR(mask.count(), analytic, 0.02 * analytic) << "len=" << len;
  }
  const auto wide = rasterize({{{100, 150}, {600, 150}}}, 30.0, kCanvas);
  const double analytic = 30.0 * 500.0 + kPi * 225.0;
  EXPECT_NEAR(wide.count(), analytic, 0.02 * analytic);
}

TEST(Rasterize, WidthScalesWithCanvas) {
  const Canvas half{400, 144};
  const auto mask = rasterize(vertical(200, 20, 120), 16.0, half);
  const double analytic = 8.0 * 100.0 + kPi * 16.0;
  EXPECT_NEAR(mask.count(), analytic, 0.02 * analytic);
}

TEST(Rasterize, DegenerateSegmentIsADisc) {
  const auto mask = rasterize({{{300, 150}, {300, 150}}}, 16.0, kCanvas);
  EXPECT_EQ(mask.count(), covered_pixels({300, 150}, {300, 150}, 8.0, kCanvas));
  EXPECT_NEAR(mask.count(), kPi * 64.0, 0.05 * kPi * 64.0);
  // pixel 307 spans [307, 308), centre 7.5 px from the disc centre
  EXPECT_TRUE(mask.get(307, 150));
  EXPECT_FALSE(mask.get(308, 150));
  EXPECT_TRUE(mask.get(292, 150));
  EXPECT_FALSE(mask.get(291, 150));
  EXPECT_TRUE(mask.get(300, 142));
}

TEST(Rasterize, ClipsToCanvasAndMatchesBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(-100.0, 900.0), uy(-60.0, 350.0), uw(4.0, 40.0);
  for (int i = 0; i < 20; ++i) {
    const Point2 a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)};
    const double w = uw(rng);
    EXPECT_EQ(rasterize({{a, b}}, w, kCanvas).count(), covered_pixels(a, b, w / 2.0, kCanvas));
  }
  EXPECT_THROW(rasterize(vertical(10, 10, 20), 0.0, kCanvas), PreconditionError);
}

TEST(LaneIou, IdenticalPolylinesGiveWidthRatio) {
  const Canvas tall{800, 2000};
  const auto lane = vertical(400, 100, 1900);
  EXPECT_NEAR(lane_iou(lane, lane, tall), 16.0 / 30.0, 0.02);
  // full-height lane on the default canvas; caps are clipped away
  const auto full = vertical(400, 0, 287);
  EXPECT_NEAR(lane_iou(full, full, kCanvas), 16.0 / 30.0, 0.02);
}

TEST(LaneIou, DisjointAndShiftedAreZero) {
  EXPECT_EQ(lane_iou(vertical(150, 100, 287), vertical(650, 100, 287), kCanvas), 0.0);
  EXPECT_EQ(lane_iou(vertical(300, 100, 287), vertical(500, 100, 287), kCanvas), 0.0);
}

TEST(LaneIou, SymmetricForEqualWidths) {
  const auto a = rasterize({{{100, 280}, {300, 120}}}, 16.0, kCanvas);
  const auto b = rasterize({{{110, 280}, {290, 110}}}, 16.0, kCanvas);
  EXPECT_EQ(mask_iou(a, b), mask_iou(b, a));
  EXPECT_GT(mask_iou(a, b), 0.0);
}

TEST(Accuracy, ThreeOfFourMatched) {
  FrameLanes gt{{0, {vertical(100, 0, 287), vertical(300, 0, 287), vertical(500, 0, 287), vertical(700, 0, 287)}}};
  FrameLanes pred{{0, {vertical(100, 0, 287), vertical(300, 0, 287), vertical(500, 0, 287)}}};
  const auto report = accuracy(gt, pred, {0.3, 0.4, 0.5}, kCanvas);
  ASSERT_EQ(report.rows.size(), 3u);
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.n_tp, 3u);
    EXPECT_EQ(row.n_gt, 4u);
    EXPECT_EQ(row.accuracy, 0.75);
  }
  EXPECT_TRUE(report.warnings.empty());
}

TEST(Accuracy, NoPredictionsScoresZero) {
  FrameLanes gt{{0, {vertical(100, 0, 287)}}, {1, {vertical(100, 0, 287), vertical(600, 0, 287)}}};
  const auto report = accuracy(gt, {}, {0.3, 0.4, 0.5}, kCanvas);
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.n_tp, 0u);
    EXPECT_EQ(row.n_gt, 3u);
    EXPECT_EQ(row.accuracy, 0.0);
  }
}

TEST(Accuracy, PredictionWithoutGroundTruthWarns) {
  FrameLanes gt{{0, {vertical(100, 0, 287)}}};
  FrameLanes pred{{0, {vertical(100, 0, 287)}}, {7, {vertical(400, 0, 287)}}};
  const auto report = accuracy(gt, pred, {0.5}, kCanvas);
  EXPECT_EQ(report.rows[0].n_gt, 1u);
  EXPECT_EQ(report.rows[0].n_tp, 1u);
  ASSERT_EQ(report.warnings.size(), 1u);
  EXPECT_NE(report.warnings[0].find("7"), std::string::npos);
}

TEST(Accuracy, OneToOneAssignment) {
  // two ground truths side by side, one wide prediction between them
  const std::vector<LanePolyline> gt{vertical(395, 0, 287), vertical(405, 0, 287)};
  const std::vector<LanePolyline> pred{vertical(400, 0, 287)};
  const auto assigned = assign_lanes(gt, pred, kCanvas);
  EXPECT_EQ(std::count_if(assigned.begin(), assigned.end(), [](double v) { return v > 0.0; }), 1);
}

TEST(Accuracy, NonIncreasingInThreshold) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> shift(0.0, 8.0);
  const std::vector<double> thresholds{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  for (int trial = 0; trial < 5; ++trial) {
    FrameLanes gt, pred;
    for (int f = 0; f < 10; ++f) {
      for (double x : {200.0, 550.0}) {
        gt[f].push_back({{{x, 287}, {x + 60, 100}}});
        const double s = shift(rng);
        pred[f].push_back({{{x + s, 287}, {x + 60 + shift(rng), 100}}});
      }
    }
    const auto report = accuracy(gt, pred, thresholds, kCanvas);
    for (std::size_t k = 1; k < report.rows.size(); ++k) {
      EXPECT_LE(report.rows[k].accuracy, report.rows[k - 1].accuracy);
    }
    for (const auto& row : report.rows) EXPECT_EQ(row.accuracy, static_cast<double>(row.n_tp) / row.n_gt);
  }
  EXPECT_THROW(accuracy({}, {}, {1.0}, kCanvas), PreconditionError);
}

TEST(LaneFiles, FormatParseRoundTrip) {
  const std::vector<LanePolyline> lanes{{{{1.5, 287}, {10.25, 277}}}, {{{700, 287}, {650.125, 200}, {600, 150}}}};
  std::istringstream in(format_lanes(lanes));
  EXPECT_EQ(parse_lanes(in), lanes);
  EXPECT_EQ(format_lanes(lanes), "1.500 287.000 10.250 277.000\n700.000 287.000 650.125 200.000 600.000 150.000\n");
}

TEST(LaneFiles, Errors) {
  std::istringstream odd("1 2 3\n");
  EXPECT_THROW(parse_lanes(odd), FormatError);
  std::istringstream bad("1 2 3 4\n5 x 6 7\n");
  try {
    parse_lanes(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  std::istringstream blank("\n\n1 2 3 4\n");
  EXPECT_EQ(parse_lanes(blank).size(), 1u);
}

TEST(LaneFiles, FrameNames) {
  EXPECT_EQ(frame_name(42, kLaneFileSuffix), "000042.lines.txt");
  EXPECT_EQ(frame_index("000042.lines.txt"), 42);
  EXPECT_FALSE(frame_index("lines.txt").has_value());
}

TEST(ReportCsv, HeaderAndRows) {
  AccuracyReport report;
  report.rows = {{0.3, 3, 4, 0.75}, {0.5, 1, 4, 0.25}};
  EXPECT_EQ(format_report_csv(report), "threshold,n_tp,n_gt,accuracy\n0.30,3,4,0.750000\n0.50,1,4,0.250000\n");
}
