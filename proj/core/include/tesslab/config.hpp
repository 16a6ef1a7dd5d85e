#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tesslab {

/// Experiment configuration: a versioned key = value text format with `#`
/// comments and comma-separated lists. Unknown keys are rejected so typos
/// fail loudly.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  long replicates = 1000;
  std::vector<double> T_list = {500.0, 1500.0, 3000.0};
  double alpha = 10.0;
  double lambda = 1.0;
  int workers = 4;
  std::string out_dir;
  std::string label = "run";
  double window_half_side = 25.0;
  long traces = 100;
  double trace_T = 300.0;
  double second_center_x = 0.46;  // Euclidean x of the second disk center
  double second_center_y = 0.0;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text);
  std::string echo() const;  // canonical round-trippable form
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tesslab
