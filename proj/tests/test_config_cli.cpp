#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "aclora/config.hpp"
#include "aclora/run.hpp"

using namespace aclora;
namespace fs = std::filesystem;

namespace {

const std::string kFlatConfig = R"(# sample experiment
task.d = 16
task.k = 12
task.r_star = 2
task.profile = 2,1
task.label_noise_std = 0.1
task.seed = 5

train.total_epochs = 8
train.restart_interval = 4
train.batches_per_epoch = 3
train.batch_size = 8
train.learning_rate = 0.03
train.optimizer = adam
train.max_rank = 4
train.union_scope = global
train.mode = ac_lora
train.seed = 5

output.dir = run_out
output.emit_plots = false
)";

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("aclora_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& output_root) {
  const std::string cmd = "ACLORA_OUTPUT_ROOT=" + output_root.string() + " " +
                          std::string(ACLORA_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("flat config parses every section") {
  const RunConfig cfg = parse_config_text(kFlatConfig);
  CHECK(cfg.task.d == 16);
  CHECK(cfg.task.k == 12);
  CHECK(cfg.task.r_star == 2);
  CHECK(cfg.task.profile == std::vector<double>{2, 1});
  CHECK(cfg.task.label_noise_std == 0.1);
  CHECK(cfg.task.seed == 5);
  CHECK(cfg.train.total_epochs == 8);
  CHECK(cfg.train.restart_interval == 4);
  CHECK(cfg.train.optimizer == Optimizer::adam);
  CHECK(cfg.train.max_rank == 4);
  CHECK(cfg.train.union_scope == UnionScope::global);
  CHECK(cfg.train.mode == TrainMode::ac_lora);
  CHECK(cfg.output.dir == "run_out");
  CHECK_FALSE(cfg.output.emit_plots);
}

TEST_CASE("unknown keys and malformed lines report the line") {
  try {
    parse_config_text("task.d = 8\ntask.bogus = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("task.bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("just a line without equals\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("train.total_epochs = banana\n"),
                  ConfigError);
}

TEST_CASE("profile length must match r_star") {
  CHECK_THROWS_AS(
      parse_config_text("task.r_star = 3\ntask.profile = 1,1\n"),
      ConfigError);
}

TEST_CASE("json config parses and roundtrips") {
  const RunConfig cfg = parse_config_text(kFlatConfig);
  const nlohmann::json j = to_json(cfg);
  const RunConfig back = config_from_json(j);
  CHECK(back.task.d == cfg.task.d);
  CHECK(back.train.learning_rate == cfg.train.learning_rate);
  CHECK(back.train.optimizer == cfg.train.optimizer);
  CHECK(back.output.dir == cfg.output.dir);
  // A JSON document is accepted directly by the text parser.
  const RunConfig from_text = parse_config_text(j.dump());
  CHECK(from_text.task.k == cfg.task.k);
  CHECK(from_text.train.union_scope == cfg.train.union_scope);
}

TEST_CASE("override replaces a single key") {
  RunConfig cfg = parse_config_text(kFlatConfig);
  apply_override(cfg, "train.learning_rate=0.5");
  CHECK(cfg.train.learning_rate == 0.5);
  apply_override(cfg, "train.mode=fixed_rank_baseline");
  CHECK(cfg.train.mode == TrainMode::fixed_rank_baseline);
  CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "train.nope=1"), ConfigError);
}

TEST_CASE("task config builds the described task") {
  TaskConfig tc;
  tc.d = 10;
  tc.k = 8;
  tc.r_star = 2;
  tc.seed = 9;
  const SyntheticTask task = tc.build();
  CHECK(task.out_dim() == 10);
  CHECK(task.in_dim() == 8);
  CHECK(task.true_rank == 2);
  CHECK(task.spectrum_profile == default_profile(2));
}

TEST_CASE("cli run writes its artifacts and exits zero") {
  const fs::path root = temp_dir("run");
  const fs::path config = write_file(root / "exp.conf", kFlatConfig);
  CHECK(run_cli("run " + config.string(), root) == kExitOk);
  const fs::path out = root / "run_out";
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "epochs.csv"));
  CHECK(fs::exists(out / "restarts.csv"));
  CHECK(fs::exists(out / "adapter.json"));
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary.contains("final_eval_loss"));
  CHECK(summary["config"]["train"]["total_epochs"] == 8);
}

TEST_CASE("cli rejects a bad config with exit code 2") {
  const fs::path root = temp_dir("badcfg");
  const fs::path config = write_file(root / "bad.conf", "task.bogus = 1\n");
  CHECK(run_cli("run " + config.string(), root) == kExitBadConfig);
  CHECK(run_cli("run " + (root / "missing.conf").string(), root) ==
        kExitBadConfig);
}

TEST_CASE("cli reports divergence with exit code 3") {
  const fs::path root = temp_dir("diverge");
  const fs::path config = write_file(root / "exp.conf", kFlatConfig);
  CHECK(run_cli("run " + config.string() +
                    " --set train.optimizer=sgd --set train.learning_rate=100",
                root) == kExitDiverged);
}

TEST_CASE("cli overrides reach the output config echo") {
  const fs::path root = temp_dir("override");
  const fs::path config = write_file(root / "exp.conf", kFlatConfig);
  CHECK(run_cli("run " + config.string() +
                    " --set train.total_epochs=6 --set output.dir=alt_out",
                root) == kExitOk);
  const auto summary =
      nlohmann::json::parse(slurp(root / "alt_out" / "summary.json"));
  CHECK(summary["config"]["train"]["total_epochs"] == 6);
}

TEST_CASE("cli sweep writes per-seed rows and medians") {
  const fs::path root = temp_dir("sweep");
  const fs::path config = write_file(root / "exp.conf", kFlatConfig);
  CHECK(run_cli("sweep " + config.string() + " --seeds 1,2 --jobs 2", root) ==
        kExitOk);
  const std::string csv = slurp(root / "run_out" / "sweep.csv");
  CHECK(csv.find("seed,mode,final_eval,final_I,recovery_error") !=
        std::string::npos);
  CHECK(csv.find("ac_lora") != std::string::npos);
  CHECK(csv.find("baseline") != std::string::npos);
  CHECK(csv.find("median") != std::string::npos);
}

TEST_CASE("cli theory writes the concentration grid") {
  const fs::path root = temp_dir("theory");
  CHECK(run_cli("theory --dims 4,8 --samples 16 --trials 50 --seed 1 --out " +
                    (root / "theory_out").string(),
                root) == kExitOk);
  CHECK(fs::exists(root / "theory_out" / "theory.csv"));
  const auto summary = nlohmann::json::parse(
      slurp(root / "theory_out" / "theory_summary.json"));
  REQUIRE(summary.is_array());
  CHECK(summary.size() == 2);  // one entry per (R, lambda) cell
  CHECK(summary[0].contains("predicted_mean"));
}
