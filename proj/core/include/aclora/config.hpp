#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aclora/tasks.hpp"
#include "aclora/trainer.hpp"

namespace aclora {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Task descriptor: everything needed to rebuild a SyntheticTask from config.
struct TaskConfig {
  int d = 64;
  int k = 64;
  int r_star = 4;
  std::vector<double> profile;  // empty -> default_profile(r_star)
  double input_std = 1.0;
  double label_noise_std = 0.05;
  std::uint64_t seed = 0;

  SyntheticTask build() const;
};

struct OutputConfig {
  std::string dir = "out";
  bool emit_plots = false;
};

struct RunConfig {
  TaskConfig task;
  TrainConfig train;
  OutputConfig output;
};

// Accepts either the flat key=value format ('#' comments, keys like
// task.d, train.learning_rate, output.dir) or a JSON document with the
// same nesting. Errors carry the offending line for the flat format.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

// Applies one "key=value" override using the flat key names.
void apply_override(RunConfig& config, const std::string& assignment);

}  // namespace aclora
