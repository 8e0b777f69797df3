#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "lanetrack/commands.hpp"
#include "lanetrack/scenario_io.hpp"
#include "lanetrack/synth.hpp"
#include "support.hpp"

using namespace lanetrack;
using lanetrack::testing::one_lane_scenario;
using lanetrack::testing::scratch_dir;
using lanetrack::testing::straight_lane;

namespace {

bool same_bits(const ProbabilityMap& a, const ProbabilityMap& b) {
  return a.values().size() == b.values().size() &&
         std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(float)) == 0;
}

}  // namespace

TEST(Render, GaussianCrossSection) {
  const auto frame = render(one_lane_scenario(0.0, 400.0, 3.0, 0.9), 0);
  for (std::uint32_t y : {0u, 150u, 287u}) {
    EXPECT_FLOAT_EQ(frame.map.at(0, 400, y), 0.9f);
    EXPECT_NEAR(frame.map.at(0, 397, y), 0.9 * std::exp(-0.5), 1e-6);
    EXPECT_NEAR(frame.map.at(0, 403, y), 0.9 * std::exp(-0.5), 1e-6);
    const auto row = frame.map.row(0, y);
    EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), 400);
  }
  ASSERT_EQ(frame.ground_truth.size(), 1u);
  EXPECT_EQ(frame.ground_truth[0].points.front(), (Point2{400.0, 287.0}));
}

TEST(Render, OverlappingLanesCombineByMax) {
  Scenario s = one_lane_scenario(0.0, 400.0, 3.0, 0.9);
  s.lanes.push_back(straight_lane(0.0, 402.0, 3.0, 0.5));
  const auto frame = render(s, 0);
  EXPECT_FLOAT_EQ(frame.map.at(0, 400, 200), 0.9f);
  EXPECT_FLOAT_EQ(frame.map.at(0, 410, 200), static_cast<float>(0.5 * std::exp(-0.5 * 64.0 / 9.0)));
}

TEST(Render, DeterministicForASeed) {
  Scenario s = one_lane_scenario(0.4, 300.0);
  s.noise = 0.3;
  s.dropout = 0.2;
  s.seed = 77;
  s.frames = 3;
  EXPECT_TRUE(same_bits(render(s, 2).map, render(s, 2).map));
  EXPECT_FALSE(same_bits(render(s, 1).map, render(s, 2).map));
  Scenario other = s;
  other.seed = 78;
  EXPECT_FALSE(same_bits(render(s, 2).map, render(other, 2).map));
}

TEST(Render, NoiseStaysInRange) {
  Scenario s = one_lane_scenario(0.0, 400.0);
  s.noise = 1.0;
  s.seed = 5;
  const auto frame = render(s, 0);
  for (float v : frame.map.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Render, FullDropoutRemovesTheLane) {
  Scenario s = one_lane_scenario(0.0, 400.0);
  s.dropout = 1.0;
  const auto frame = render(s, 0);
  for (float v : frame.map.values()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(frame.ground_truth.size(), 1u);
}

TEST(Render, LaneChangeScriptJumpsGroundTruth) {
  Scenario s;
  s.frames = 30;
  auto lane = straight_lane(0.0, 600.0);
  lane.keyframes = {{0, 0.0, 600.0}, {14, 0.0, 600.0}, {15, 0.0, 450.0}};
  s.lanes = {lane};
  EXPECT_DOUBLE_EQ(render(s, 14).ground_truth[0].points.front().x, 600.0);
  EXPECT_DOUBLE_EQ(render(s, 15).ground_truth[0].points.front().x, 450.0);
  EXPECT_DOUBLE_EQ(render(s, 29).ground_truth[0].points.front().x, 450.0);
}

TEST(Render, VisibilityWindowAndNonGroundTruthLanes) {
  Scenario s;
  s.frames = 10;
  auto a = straight_lane(0.0, 200.0);
  a.appear = 3;
  a.disappear = 6;
  auto b = straight_lane(0.0, 600.0);
  b.ground_truth = false;
  s.lanes = {a, b};
  EXPECT_TRUE(render(s, 2).ground_truth.empty());
  EXPECT_EQ(render(s, 3).ground_truth.size(), 1u);
  EXPECT_TRUE(render(s, 6).ground_truth.empty());
  EXPECT_GT(render(s, 6).map.at(0, 600, 200), 0.5f);
  EXPECT_EQ(render(s, 6).map.at(0, 200, 200), 0.0f);
  EXPECT_THROW(render(s, 10), RangeError);
}

TEST(Render, KeyframesInterpolateLinearly) {
  auto lane = straight_lane(0.0, 0.0);
  lane.keyframes = {{0, 0.0, 100.0}, {10, 1.0, 300.0}};
  const Line mid = lane.centreline(5);
  EXPECT_DOUBLE_EQ(mid.slope, 0.5);
  EXPECT_DOUBLE_EQ(mid.intercept, 200.0);
  EXPECT_DOUBLE_EQ(lane.centreline(-3).intercept, 100.0);
  EXPECT_DOUBLE_EQ(lane.centreline(40).intercept, 300.0);
}

TEST(Scenario, ValidationErrors) {
  auto s = one_lane_scenario(0.0, 400.0);
  s.lanes[0].sigma = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = one_lane_scenario(0.0, 400.0);
  s.lanes[0].peak = 1.2;
  EXPECT_THROW(s.validate(), ConfigError);
  s = one_lane_scenario(0.0, 400.0);
  s.lanes[0].channel = 1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = one_lane_scenario(0.0, 400.0);
  s.lanes[0].keyframes = {{5, 0, 0}, {5, 0, 0}};
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(ScenarioFile, RoundTripAndUnknownKeys) {
  Scenario s = one_lane_scenario(0.25, 123.456789, 2.5, 0.75);
  s.frames = 12;
  s.noise = 0.1;
  s.seed = 99;
  s.channels = 2;
  auto second = straight_lane(-0.5, 700.0, 4.0, 0.6, 1);
  second.appear = 2;
  second.disappear = 9;
  second.ground_truth = false;
  second.y_top = 101.5;
  second.keyframes.push_back({7, -0.4, 650.0});
  s.lanes.push_back(second);
  const auto text = to_yaml(s);
  EXPECT_EQ(parse_scenario(text), s);
  EXPECT_EQ(to_yaml(parse_scenario(text)), text);

  EXPECT_THROW(parse_scenario("frames: 3\ncolour: red\n"), ConfigError);
  EXPECT_THROW(parse_scenario("lanes:\n  - sigma: 2\n    wobble: 1\n    keyframes: [{frame: 0, slope: 0, intercept: 5}]\n"),
               ConfigError);
  EXPECT_THROW(parse_scenario("frames: [1, 2]\n"), ConfigError);
}

TEST(RunSynth, WritesMapAndGroundTruthPerFrame) {
  const auto dir = scratch_dir("synth");
  Scenario s = one_lane_scenario(0.3, 250.0);
  s.frames = 5;
  run_synth(s, dir);
  EXPECT_EQ(list_frames(dir, kRasterSuffix).size(), 5u);
  EXPECT_EQ(list_frames(dir, kLaneFileSuffix).size(), 5u);
  EXPECT_TRUE(same_bits(load_map(dir / "000003.lpm"), render(s, 3).map));
  EXPECT_EQ(load_lanes(dir / "000003.lines.txt").size(), 1u);
  std::filesystem::remove_all(dir);
}
