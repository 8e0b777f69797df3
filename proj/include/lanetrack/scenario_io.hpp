#pragma once

// Scenario files (YAML):
//
//   frames: 30
//   width: 800
//   height: 288
//   channels: 2
//   noise: 0.0
//   dropout: 0.0
//   seed: 7
//   lanes:
//     - name: left
//       channel: 0
//       sigma: 3
//       peak: 0.9
//       y_top: 101
//       appear: 0          # optional
//       disappear: 30      # optional, exclusive
//       ground_truth: true # optional
//       keyframes:
//         - {frame: 0, slope: -1.5, intercept: 680}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "lanetrack/errors.hpp"
#include "lanetrack/synth.hpp"

namespace lanetrack {

namespace detail {

inline void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("scenario key '") + key + "' has an invalid value");
  }
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a key-value mapping");
  detail::check_keys(root, {"frames", "width", "height", "channels", "noise", "dropout", "seed", "lanes"},
                     "scenario");
  using detail::get_or;
  Scenario s;
  s.frames = get_or<std::int64_t>(root, "frames", s.frames);
  s.canvas.width = get_or<std::uint32_t>(root, "width", s.canvas.width);
  s.canvas.height = get_or<std::uint32_t>(root, "height", s.canvas.height);
  s.channels = get_or<std::uint32_t>(root, "channels", s.channels);
  s.noise = get_or<double>(root, "noise", s.noise);
  s.dropout = get_or<double>(root, "dropout", s.dropout);
  s.seed = get_or<std::uint64_t>(root, "seed", s.seed);
  if (const auto lanes = root["lanes"]) {
    if (!lanes.IsSequence()) throw ConfigError("scenario 'lanes' must be a list");
    for (const auto& node : lanes) {
      detail::check_keys(node,
                         {"name", "channel", "sigma", "peak", "y_top", "appear", "disappear", "ground_truth",
                          "keyframes"},
                         "lane block");
      ScriptedLane lane;
      lane.name = get_or<std::string>(node, "name", "lane" + std::to_string(s.lanes.size()));
      lane.channel = get_or<std::uint32_t>(node, "channel", lane.channel);
      lane.sigma = get_or<double>(node, "sigma", lane.sigma);
      lane.peak = get_or<double>(node, "peak", lane.peak);
      lane.y_top = get_or<double>(node, "y_top", lane.y_top);
      lane.appear = get_or<std::int64_t>(node, "appear", lane.appear);
      if (node["disappear"]) lane.disappear = get_or<std::int64_t>(node, "disappear", 0);
      lane.ground_truth = get_or<bool>(node, "ground_truth", lane.ground_truth);
      if (const auto keys = node["keyframes"]) {
        for (const auto& k : keys) {
          detail::check_keys(k, {"frame", "slope", "intercept"}, "keyframe");
          lane.keyframes.push_back({get_or<std::int64_t>(k, "frame", 0), get_or<double>(k, "slope", 0.0),
                                    get_or<double>(k, "intercept", 0.0)});
        }
      }
      s.lanes.push_back(std::move(lane));
    }
  }
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline std::string to_yaml(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "frames" << YAML::Value << s.frames;
  out << YAML::Key << "width" << YAML::Value << s.canvas.width;
  out << YAML::Key << "height" << YAML::Value << s.canvas.height;
  out << YAML::Key << "channels" << YAML::Value << s.channels;
  out << YAML::Key << "noise" << YAML::Value << s.noise;
  out << YAML::Key << "dropout" << YAML::Value << s.dropout;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "lanes" << YAML::Value << YAML::BeginSeq;
  for (const auto& l : s.lanes) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << l.name;
    out << YAML::Key << "channel" << YAML::Value << l.channel;
    out << YAML::Key << "sigma" << YAML::Value << l.sigma;
    out << YAML::Key << "peak" << YAML::Value << l.peak;
    out << YAML::Key << "y_top" << YAML::Value << l.y_top;
    out << YAML::Key << "appear" << YAML::Value << l.appear;
    if (l.disappear) out << YAML::Key << "disappear" << YAML::Value << *l.disappear;
    out << YAML::Key << "ground_truth" << YAML::Value << l.ground_truth;
    out << YAML::Key << "keyframes" << YAML::Value << YAML::BeginSeq;
    for (const auto& k : l.keyframes) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "frame" << YAML::Value << k.frame << YAML::Key
          << "slope" << YAML::Value << k.slope << YAML::Key << "intercept" << YAML::Value << k.intercept
          << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace lanetrack
