#include "aclora/config.hpp"

#include <fstream>
#include <sstream>

namespace aclora {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_profile(const std::string& value) {
  std::vector<double> profile;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) profile.push_back(std::stod(item));
  }
  return profile;
}

Optimizer parse_optimizer(const std::string& v) {
  if (v == "sgd") return Optimizer::sgd;
  if (v == "adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer '" + v + "' (expected sgd|adam)");
}

UnionScope parse_scope(const std::string& v) {
  if (v == "pair") return UnionScope::pair;
  if (v == "global") return UnionScope::global;
  throw ConfigError("unknown union_scope '" + v + "' (expected pair|global)");
}

TrainMode parse_mode(const std::string& v) {
  if (v == "ac_lora") return TrainMode::ac_lora;
  if (v == "fixed_rank_baseline") return TrainMode::fixed_rank_baseline;
  throw ConfigError("unknown mode '" + v +
                    "' (expected ac_lora|fixed_rank_baseline)");
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected boolean, got '" + v + "'");
}

const char* optimizer_name(Optimizer o) {
  return o == Optimizer::sgd ? "sgd" : "adam";
}
const char* scope_name(UnionScope s) {
  return s == UnionScope::pair ? "pair" : "global";
}
const char* mode_name(TrainMode m) {
  return m == TrainMode::ac_lora ? "ac_lora" : "fixed_rank_baseline";
}

void set_key(RunConfig& config, const std::string& key,
             const std::string& value) {
  TaskConfig& t = config.task;
  TrainConfig& tr = config.train;
  OutputConfig& o = config.output;
  if (key == "task.d") t.d = std::stoi(value);
  else if (key == "task.k") t.k = std::stoi(value);
  else if (key == "task.r_star") t.r_star = std::stoi(value);
  else if (key == "task.profile") t.profile = parse_profile(value);
  else if (key == "task.input_std") t.input_std = std::stod(value);
  else if (key == "task.label_noise_std") t.label_noise_std = std::stod(value);
  else if (key == "task.seed") t.seed = std::stoull(value);
  else if (key == "train.total_epochs") tr.total_epochs = std::stoi(value);
  else if (key == "train.restart_interval")
    tr.restart_interval = std::stoi(value);
  else if (key == "train.batches_per_epoch")
    tr.batches_per_epoch = std::stoi(value);
  else if (key == "train.batch_size") tr.batch_size = std::stoi(value);
  else if (key == "train.learning_rate") tr.learning_rate = std::stod(value);
  else if (key == "train.optimizer") tr.optimizer = parse_optimizer(value);
  else if (key == "train.adam.beta1") tr.adam.beta1 = std::stod(value);
  else if (key == "train.adam.beta2") tr.adam.beta2 = std::stod(value);
  else if (key == "train.adam.epsilon") tr.adam.epsilon = std::stod(value);
  else if (key == "train.max_rank") tr.max_rank = std::stoi(value);
  else if (key == "train.union_scope") tr.union_scope = parse_scope(value);
  else if (key == "train.mode") tr.mode = parse_mode(value);
  else if (key == "train.seed") tr.seed = std::stoull(value);
  else if (key == "train.loss_floor") tr.loss_floor = std::stod(value);
  else if (key == "train.loss_ceiling") tr.loss_ceiling = std::stod(value);
  else if (key == "train.eval_samples_per_epoch")
    tr.eval_samples_per_epoch = std::stoi(value);
  else if (key == "output.dir") o.dir = value;
  else if (key == "output.emit_plots") o.emit_plots = parse_bool(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void validate(const RunConfig& config) {
  try {
    config.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid train config: ") + e.what());
  }
  if (config.task.d < 1 || config.task.k < 1) {
    throw ConfigError("invalid task config: dimensions must be positive");
  }
  if (config.task.r_star < 0 ||
      config.task.r_star > std::min(config.task.d, config.task.k)) {
    throw ConfigError("invalid task config: r_star out of range");
  }
  if (!config.task.profile.empty() &&
      static_cast<int>(config.task.profile.size()) != config.task.r_star) {
    throw ConfigError("invalid task config: profile length != r_star");
  }
  if (config.train.max_rank > std::min(config.task.d, config.task.k)) {
    throw ConfigError("invalid config: max_rank exceeds min(d, k)");
  }
}

}  // namespace

SyntheticTask TaskConfig::build() const {
  std::vector<double> p = profile.empty() ? default_profile(r_star) : profile;
  SyntheticTask task = make_task(d, k, r_star, p, label_noise_std, seed);
  task.input_std = input_std;
  return task;
}

RunConfig parse_config_text(const std::string& text) {
  const std::string trimmed = trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    try {
      return config_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("JSON config error: ") + e.what());
    }
  }

  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_key(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for '" +
                        key + "': " + e.what());
    }
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json j;
  j["task"] = {{"d", config.task.d},
               {"k", config.task.k},
               {"r_star", config.task.r_star},
               {"profile", config.task.profile.empty()
                               ? default_profile(config.task.r_star)
                               : config.task.profile},
               {"input_std", config.task.input_std},
               {"label_noise_std", config.task.label_noise_std},
               {"seed", config.task.seed}};
  j["train"] = {{"total_epochs", config.train.total_epochs},
                {"restart_interval", config.train.restart_interval},
                {"batches_per_epoch", config.train.batches_per_epoch},
                {"batch_size", config.train.batch_size},
                {"learning_rate", config.train.learning_rate},
                {"optimizer", optimizer_name(config.train.optimizer)},
                {"adam",
                 {{"beta1", config.train.adam.beta1},
                  {"beta2", config.train.adam.beta2},
                  {"epsilon", config.train.adam.epsilon}}},
                {"max_rank", config.train.max_rank},
                {"union_scope", scope_name(config.train.union_scope)},
                {"mode", mode_name(config.train.mode)},
                {"seed", config.train.seed},
                {"loss_floor", config.train.loss_floor},
                {"loss_ceiling", config.train.loss_ceiling},
                {"eval_samples_per_epoch",
                 config.train.eval_samples_per_epoch}};
  j["output"] = {{"dir", config.output.dir},
                 {"emit_plots", config.output.emit_plots}};
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig config;
  auto grab = [&](const char* section, const char* key, auto setter) {
    if (j.contains(section) && j[section].contains(key)) setter(j[section][key]);
  };
  grab("task", "d", [&](const auto& v) { config.task.d = v; });
  grab("task", "k", [&](const auto& v) { config.task.k = v; });
  grab("task", "r_star", [&](const auto& v) { config.task.r_star = v; });
  grab("task", "profile", [&](const auto& v) {
    config.task.profile = v.template get<std::vector<double>>();
  });
  grab("task", "input_std", [&](const auto& v) { config.task.input_std = v; });
  grab("task", "label_noise_std",
       [&](const auto& v) { config.task.label_noise_std = v; });
  grab("task", "seed", [&](const auto& v) { config.task.seed = v; });
  grab("train", "total_epochs",
       [&](const auto& v) { config.train.total_epochs = v; });
  grab("train", "restart_interval",
       [&](const auto& v) { config.train.restart_interval = v; });
  grab("train", "batches_per_epoch",
       [&](const auto& v) { config.train.batches_per_epoch = v; });
  grab("train", "batch_size",
       [&](const auto& v) { config.train.batch_size = v; });
  grab("train", "learning_rate",
       [&](const auto& v) { config.train.learning_rate = v; });
  grab("train", "optimizer", [&](const auto& v) {
    config.train.optimizer = parse_optimizer(v.template get<std::string>());
  });
  if (j.contains("train") && j["train"].contains("adam")) {
    const auto& a = j["train"]["adam"];
    if (a.contains("beta1")) config.train.adam.beta1 = a["beta1"];
    if (a.contains("beta2")) config.train.adam.beta2 = a["beta2"];
    if (a.contains("epsilon")) config.train.adam.epsilon = a["epsilon"];
  }
  grab("train", "max_rank", [&](const auto& v) { config.train.max_rank = v; });
  grab("train", "union_scope", [&](const auto& v) {
    config.train.union_scope = parse_scope(v.template get<std::string>());
  });
  grab("train", "mode", [&](const auto& v) {
    config.train.mode = parse_mode(v.template get<std::string>());
  });
  grab("train", "seed", [&](const auto& v) { config.train.seed = v; });
  grab("train", "loss_floor",
       [&](const auto& v) { config.train.loss_floor = v; });
  grab("train", "loss_ceiling",
       [&](const auto& v) { config.train.loss_ceiling = v; });
  grab("train", "eval_samples_per_epoch",
       [&](const auto& v) { config.train.eval_samples_per_epoch = v; });
  grab("output", "dir", [&](const auto& v) {
    config.output.dir = v.template get<std::string>();
  });
  grab("output", "emit_plots",
       [&](const auto& v) { config.output.emit_plots = v; });
  validate(config);
  return config;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  try {
    set_key(config, trim(assignment.substr(0, eq)),
            trim(assignment.substr(eq + 1)));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("override '" + assignment + "': " + e.what());
  }
  validate(config);
}

}  // namespace aclora
