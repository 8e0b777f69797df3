// lanetrack: track / eval / synth / bench over directories of per-frame
// probability maps.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data or format error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lanetrack/lanetrack.hpp"

namespace fs = std::filesystem;
using namespace lanetrack;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct Options {
  std::string config;
  std::string input;
  std::string output;
  std::string gt;
  std::string thresholds;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> match_k;
  bool no_merge = false;
  std::optional<std::uint32_t> reps;
  std::string checkpoint;
  std::string resume;
};

std::vector<double> parse_threshold_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad threshold '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty threshold list");
  return out;
}

// Config file first, then flags on top.
RunConfig resolve_config(const Options& opt) {
  RunConfig cfg = opt.config.empty() ? RunConfig{} : load_run_config(opt.config);
  if (!opt.input.empty()) cfg.input = opt.input;
  if (!opt.output.empty()) cfg.output = opt.output;
  if (!opt.thresholds.empty()) cfg.thresholds = parse_threshold_list(opt.thresholds);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.alpha) cfg.tracker.alpha = *opt.alpha;
  if (opt.match_k) cfg.tracker.match_k = *opt.match_k;
  if (opt.no_merge) cfg.tracker.merge_enabled = false;
  if (opt.reps) cfg.reps = *opt.reps;
  if (!opt.checkpoint.empty()) cfg.checkpoint = opt.checkpoint;
  if (!opt.resume.empty()) cfg.resume = opt.resume;
  cfg.validate();
  return cfg;
}

std::string require(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string("missing ") + what);
  return value;
}

int cmd_track(const Options& opt) {
  const auto cfg = resolve_config(opt);
  const auto summary = run_track(require(cfg.input, "--input"), require(cfg.output, "--output"), cfg);
  std::cerr << "tracked " << summary.frames << " frames\n";
  return 0;
}

int cmd_eval(const Options& opt) {
  const auto cfg = resolve_config(opt);
  const auto report = run_eval(require(opt.gt, "--gt"), require(cfg.input, "--input (prediction dir)"), cfg);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  const auto csv = format_report_csv(report);
  if (cfg.output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream(cfg.output, std::ios::trunc) << csv;
  }
  return 0;
}

int cmd_synth(const Options& opt, const std::string& scenario_file) {
  const auto cfg = resolve_config(opt);
  auto scenario = load_scenario(scenario_file);
  if (cfg.seed) scenario.seed = *cfg.seed;
  run_synth(scenario, require(cfg.output, "--output"));
  std::cerr << "rendered " << scenario.frames << " frames\n";
  return 0;
}

int cmd_bench(const Options& opt) {
  const auto cfg = resolve_config(opt);
  const auto frames = list_map_frames(require(cfg.input, "--input"));
  require_contiguous(frames);
  std::vector<ProbabilityMap> maps;
  for (const auto& [idx, paths] : frames) maps.push_back(load_frame(paths));
  const auto csv = format_bench_csv(run_bench(maps, cfg, cfg.reps));
  if (cfg.output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream(cfg.output, std::ios::trunc) << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane tracking post-processor for lane probability maps"};
  app.require_subcommand(1);
  Options opt;
  std::string scenario_file;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "YAML run configuration");
    sub->add_option("--input", opt.input, "Input directory");
    sub->add_option("--output", opt.output, "Output directory or file");
    sub->add_option("--thresholds", opt.thresholds, "Comma-separated IoU thresholds");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--alpha", opt.alpha, "EWMA smoothing coefficient");
    sub->add_option("--match-k", opt.match_k, "Match gate in lane sigmas");
    sub->add_flag("--no-merge", opt.no_merge, "Disable lane merging");
    sub->add_option("--reps", opt.reps, "Benchmark repetitions");
  };

  auto* track = app.add_subcommand("track", "Track lanes over a directory of probability maps");
  common(track);
  track->add_option("--checkpoint", opt.checkpoint, "Write tracker state here after the last frame");
  track->add_option("--resume", opt.resume, "Resume from a tracker state file");

  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth (CSV)");
  common(eval);
  eval->add_option("--gt", opt.gt, "Ground-truth lane directory")->required();

  auto* synth = app.add_subcommand("synth", "Render a synthetic scenario");
  common(synth);
  synth->add_option("scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Time each pipeline stage per frame (CSV)");
  common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*track) return cmd_track(opt);
    if (*eval) return cmd_eval(opt);
    if (*synth) return cmd_synth(opt, scenario_file);
    if (*bench) return cmd_bench(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
