#pragma once

// Tracker checkpoints as a versioned JSON document. Doubles are written in
// shortest round-trip form, so a restored tracker continues bit-identically.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lanetrack/errors.hpp"
#include "lanetrack/tracker.hpp"

namespace lanetrack {

inline constexpr int kTrackerStateVersion = 1;

inline nlohmann::json to_json(const TrackerState& state) {
  nlohmann::json lanes = nlohmann::json::array();
  for (const auto& l : state.lanes) {
    lanes.push_back({{"id", l.id},
                     {"r", l.r},
                     {"theta", l.theta},
                     {"sigma", l.sigma},
                     {"omega", l.omega},
                     {"last_seen", l.last_seen},
                     {"active", l.active},
                     {"y_min", l.y_span.min},
                     {"y_max", l.y_span.max}});
  }
  return {{"format", "lanetrack-tracker"},
          {"version", kTrackerStateVersion},
          {"canvas", {{"width", state.canvas.width}, {"height", state.canvas.height}}},
          {"next_id", state.next_id},
          {"last_frame", state.last_frame ? nlohmann::json(*state.last_frame) : nlohmann::json(nullptr)},
          {"lanes", lanes}};
}

inline TrackerState tracker_state_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "lanetrack-tracker") throw FormatError("not a tracker checkpoint");
    const int version = doc.at("version");
    if (version != kTrackerStateVersion) {
      throw FormatError("unsupported tracker checkpoint version " + std::to_string(version));
    }
    TrackerState state;
    state.canvas = {doc.at("canvas").at("width"), doc.at("canvas").at("height")};
    state.next_id = doc.at("next_id");
    if (!doc.at("last_frame").is_null()) state.last_frame = doc.at("last_frame").get<std::int64_t>();
    for (const auto& l : doc.at("lanes")) {
      TrackedLane lane;
      lane.id = l.at("id");
      lane.r = l.at("r");
      lane.theta = l.at("theta");
      lane.sigma = l.at("sigma");
      lane.omega = l.at("omega");
      lane.last_seen = l.at("last_seen");
      lane.active = l.at("active");
      lane.y_span = {l.at("y_min"), l.at("y_max")};
      state.lanes.push_back(lane);
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tracker checkpoint: ") + e.what());
  }
}

inline void save_tracker_state(const TrackerState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(state).dump(2) << '\n';
}

inline TrackerState load_tracker_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return tracker_state_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("tracker checkpoint is not valid JSON: ") + e.what(), e.byte);
  }
}

}  // namespace lanetrack
