#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aclora/config.hpp"

namespace aclora {

// Exit codes shared by the CLI and the driver functions below.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitDiverged = 3;

// output.dir, prefixed with $ACLORA_OUTPUT_ROOT when set and relative.
std::string resolve_output_dir(const std::string& dir);

// One training run: writes summary.json, epochs.csv, restarts.csv,
// adapter.json and (optionally) SVG plots into the output directory.
int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides = {});

// ac_lora and fixed_rank_baseline per seed; writes sweep.csv with one row
// per (seed, mode) plus a median/IQR aggregate row per mode.
int cmd_sweep(const std::string& config_path,
              const std::vector<std::uint64_t>& seeds, int jobs = 1,
              const std::vector<std::string>& overrides = {});

// Sphere-concentration grid; writes theory.csv and theory_summary.json.
int cmd_theory(const std::vector<int>& dims, const std::vector<int>& samples,
               int trials, std::uint64_t seed, const std::string& out_dir);

}  // namespace aclora
