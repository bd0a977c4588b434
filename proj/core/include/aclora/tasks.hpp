#pragma once

#include <cstdint>
#include <vector>

#include "aclora/adapter.hpp"
#include "aclora/rng.hpp"

namespace aclora {

// Teacher-student regression with a planted low-rank update: targets come
// from (base + true_update) * x plus optional label noise, so the correct
// adapter rank is known ground truth.
struct SyntheticTask {
  Matrix base;         // W0, d x k
  Matrix true_update;  // exact rank true_rank
  int true_rank = 0;
  std::vector<double> spectrum_profile;  // singular values of true_update
  double input_std = 1.0;
  double label_noise_std = 0.0;
  std::uint64_t seed = 0;

  int out_dim() const { return static_cast<int>(base.rows()); }
  int in_dim() const { return static_cast<int>(base.cols()); }
};

struct Batch {
  Matrix inputs;   // batch x k
  Matrix targets;  // batch x d
};

// Per-layer tasks for multi-layer experiments; shapes chain.
struct NetworkTask {
  std::vector<SyntheticTask> layers;
  double label_noise_std = 0.0;
};

// true_update = P * diag(profile) * Q with random orthonormal P, Q.
SyntheticTask make_task(int d, int k, int r_star,
                        const std::vector<double>& spectrum_profile,
                        double label_noise_std, std::uint64_t seed);

Batch sample_batch(const SyntheticTask& task, int batch_size, Rng& rng);

// Targets from the composed teacher (base_j + true_update_j) stack.
Batch sample_batch(const NetworkTask& task, int batch_size, Rng& rng);

// The default experiment profile: linearly decaying r*, r*-1, ..., 1.
std::vector<double> default_profile(int r_star);

}  // namespace aclora
