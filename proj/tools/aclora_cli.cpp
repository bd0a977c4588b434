// Experiment driver. Subcommands:
//   run <config> [--set key=value ...]
//   sweep <config> --seeds 1,2,3 [--jobs N] [--set key=value ...]
//   theory --dims 4,16,64 --samples 16,64,256 --trials 2000 --seed S [--out DIR]

#include <CLI11.hpp>

#include "aclora/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"AC-LoRA automatic rank search experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Execute one training run");
  run->add_option("config", config_path, "Config file (key=value or JSON)")
      ->required();
  run->add_option("--set", overrides, "Override a config key (key=value)");

  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  auto* sweep =
      app.add_subcommand("sweep", "Run ac_lora and baseline over seeds");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("--seeds", seeds, "Comma-separated seed list")
      ->required()
      ->delimiter(',');
  sweep->add_option("--jobs", jobs, "Parallel runs");
  sweep->add_option("--set", overrides, "Override a config key (key=value)");

  std::vector<int> dims{4, 16, 64};
  std::vector<int> samples{16, 64, 256};
  int trials = 2000;
  std::uint64_t theory_seed = 0;
  std::string theory_out = "out";
  auto* theory =
      app.add_subcommand("theory", "Sphere-concentration Monte Carlo grid");
  theory->add_option("--dims", dims, "Sphere dimensions R")->delimiter(',');
  theory->add_option("--samples", samples, "Sample counts lambda")
      ->delimiter(',');
  theory->add_option("--trials", trials, "Trials per grid cell");
  theory->add_option("--seed", theory_seed, "Base seed");
  theory->add_option("--out", theory_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aclora::kExitBadConfig;
  }

  if (run->parsed()) return aclora::cmd_run(config_path, overrides);
  if (sweep->parsed()) {
    return aclora::cmd_sweep(config_path, seeds, jobs, overrides);
  }
  return aclora::cmd_theory(dims, samples, trials, theory_seed, theory_out);
}
