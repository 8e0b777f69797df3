#pragma once

// Run configuration: a flat YAML mapping. Unknown keys are rejected.
//
//   alpha: 0.5
//   match_k: 2
//   merge_enabled: true
//   thresholds: [0.3, 0.4, 0.5]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "lanetrack/detector.hpp"
#include "lanetrack/errors.hpp"
#include "lanetrack/tracker.hpp"

namespace lanetrack {

struct RunConfig {
  TrackerConfig tracker;
  DetectionConfig detection;
  std::string input;
  std::string output;
  std::vector<double> thresholds{0.3, 0.4, 0.5};
  std::optional<std::uint64_t> seed;
  std::uint32_t reps = 1;
  Canvas canvas{800, 288};         // evaluation canvas
  std::uint32_t gt_image_width = 0;  // 0: ground truth already in canvas pixels
  std::string checkpoint;          // write tracker state here after the last frame
  std::string resume;              // start from this tracker state

  // horizon_frac is shared by extraction and the tracker's fallback range.
  void set_horizon_frac(double v) {
    tracker.horizon_frac = v;
    detection.extraction.horizon_frac = v;
  }

  void validate() const {
    tracker.validate();
    detection.extraction.validate();
    if (!(detection.variance.sigma_step > 0.0)) throw ConfigError("sigma_step must be positive");
    if (detection.min_points < 2) throw ConfigError("min_points must be >= 2");
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (canvas.width < 2 || canvas.height < 2) throw ConfigError("canvas must be at least 2x2");
    for (double t : thresholds) {
      if (!(t > 0.0 && t < 1.0)) throw ConfigError("thresholds must be in (0,1)");
    }
  }
};

namespace detail {

template <typename T>
T yaml_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has an invalid value");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("config must be a key-value mapping");

  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto& v = kv.second;
    using detail::yaml_as;
    if (key == "alpha") cfg.tracker.alpha = yaml_as<double>(v, key);
    else if (key == "psi_active") cfg.tracker.psi_active = yaml_as<double>(v, key);
    else if (key == "psi_nonactive") cfg.tracker.psi_nonactive = yaml_as<double>(v, key);
    else if (key == "match_k") cfg.tracker.match_k = yaml_as<double>(v, key);
    else if (key == "prune_weight") cfg.tracker.prune_weight = yaml_as<double>(v, key);
    else if (key == "horizon_frac") cfg.set_horizon_frac(yaml_as<double>(v, key));
    else if (key == "merge_enabled") cfg.tracker.merge_enabled = yaml_as<bool>(v, key);
    else if (key == "row_stride") cfg.detection.extraction.row_stride = yaml_as<std::uint32_t>(v, key);
    else if (key == "min_confidence") cfg.detection.extraction.min_confidence = yaml_as<double>(v, key);
    else if (key == "normal_halfwidth") cfg.detection.extraction.normal_halfwidth = yaml_as<double>(v, key);
    else if (key == "refine_step") cfg.detection.extraction.refine_step = yaml_as<double>(v, key);
    else if (key == "sigma_step") cfg.detection.variance.sigma_step = yaml_as<double>(v, key);
    else if (key == "sigma_cap") cfg.detection.variance.sigma_cap = yaml_as<double>(v, key);
    else if (key == "min_points") cfg.detection.min_points = yaml_as<std::size_t>(v, key);
    else if (key == "input") cfg.input = yaml_as<std::string>(v, key);
    else if (key == "output") cfg.output = yaml_as<std::string>(v, key);
    else if (key == "thresholds") cfg.thresholds = yaml_as<std::vector<double>>(v, key);
    else if (key == "seed") cfg.seed = yaml_as<std::uint64_t>(v, key);
    else if (key == "reps") cfg.reps = yaml_as<std::uint32_t>(v, key);
    else if (key == "canvas_width") cfg.canvas.width = yaml_as<std::uint32_t>(v, key);
    else if (key == "canvas_height") cfg.canvas.height = yaml_as<std::uint32_t>(v, key);
    else if (key == "gt_image_width") cfg.gt_image_width = yaml_as<std::uint32_t>(v, key);
    else if (key == "checkpoint") cfg.checkpoint = yaml_as<std::string>(v, key);
    else if (key == "resume") cfg.resume = yaml_as<std::string>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

inline std::string to_yaml(const RunConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "alpha" << YAML::Value << cfg.tracker.alpha;
  out << YAML::Key << "psi_active" << YAML::Value << cfg.tracker.psi_active;
  out << YAML::Key << "psi_nonactive" << YAML::Value << cfg.tracker.psi_nonactive;
  out << YAML::Key << "match_k" << YAML::Value << cfg.tracker.match_k;
  if (cfg.tracker.prune_weight) out << YAML::Key << "prune_weight" << YAML::Value << *cfg.tracker.prune_weight;
  out << YAML::Key << "horizon_frac" << YAML::Value << cfg.tracker.horizon_frac;
  out << YAML::Key << "merge_enabled" << YAML::Value << cfg.tracker.merge_enabled;
  out << YAML::Key << "row_stride" << YAML::Value << cfg.detection.extraction.row_stride;
  out << YAML::Key << "min_confidence" << YAML::Value << cfg.detection.extraction.min_confidence;
  out << YAML::Key << "normal_halfwidth" << YAML::Value << cfg.detection.extraction.normal_halfwidth;
  out << YAML::Key << "refine_step" << YAML::Value << cfg.detection.extraction.refine_step;
  out << YAML::Key << "sigma_step" << YAML::Value << cfg.detection.variance.sigma_step;
  out << YAML::Key << "sigma_cap" << YAML::Value << cfg.detection.variance.sigma_cap;
  out << YAML::Key << "min_points" << YAML::Value << cfg.detection.min_points;
  out << YAML::Key << "thresholds" << YAML::Value << YAML::Flow << cfg.thresholds;
  if (!cfg.input.empty()) out << YAML::Key << "input" << YAML::Value << cfg.input;
  if (!cfg.output.empty()) out << YAML::Key << "output" << YAML::Value << cfg.output;
  if (cfg.seed) out << YAML::Key << "seed" << YAML::Value << *cfg.seed;
  out << YAML::Key << "reps" << YAML::Value << cfg.reps;
  out << YAML::Key << "canvas_width" << YAML::Value << cfg.canvas.width;
  out << YAML::Key << "canvas_height" << YAML::Value << cfg.canvas.height;
  out << YAML::Key << "gt_image_width" << YAML::Value << cfg.gt_image_width;
  if (!cfg.checkpoint.empty()) out << YAML::Key << "checkpoint" << YAML::Value << cfg.checkpoint;
  if (!cfg.resume.empty()) out << YAML::Key << "resume" << YAML::Value << cfg.resume;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace lanetrack
