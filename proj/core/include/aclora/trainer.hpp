#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aclora/adapter.hpp"
#include "aclora/schedule.hpp"
#include "aclora/spectral_restart.hpp"
#include "aclora/tasks.hpp"

namespace aclora {

enum class Optimizer { sgd, adam };
enum class TrainMode { ac_lora, fixed_rank_baseline };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int total_epochs = 100;
  int restart_interval = 10;  // E
  int batches_per_epoch = 25;
  int batch_size = 32;
  double learning_rate = 0.05;
  Optimizer optimizer = Optimizer::sgd;
  AdamParams adam;
  int max_rank = 16;  // R
  UnionScope union_scope = UnionScope::pair;
  TrainMode mode = TrainMode::ac_lora;
  std::uint64_t seed = 0;
  double loss_floor = 1e-6;
  double loss_ceiling = 1.0 - 1e-6;
  int eval_samples_per_epoch = 256;

  void validate() const;
};

// Thrown when the loss leaves the finite range; carries where it happened.
struct TrainingDivergence : std::runtime_error {
  TrainingDivergence(int epoch_, double last_finite_loss_);
  int epoch;
  double last_finite_loss;
};

struct EpochStats {
  int epoch;        // 1-indexed
  double train_loss;
  double eval_loss;
  double p;      // threshold used if a restart fired this epoch, else NaN
  double alpha;  // likewise
  std::vector<int> retained;  // current I per adapter (last restart's, or R)
};

struct TrainRecord {
  std::vector<EpochStats> epochs;
  std::vector<RestartReport> restarts;
  AdapterNetwork adapters;
  double duration_seconds = 0.0;
};

// Algorithm: per epoch run the gradient steps, log the mean loss, and every
// restart_interval epochs (skipping the last) recompute the threshold from
// the averaged loss and restart every adapter.
TrainRecord train(const NetworkTask& task, const TrainConfig& config);
TrainRecord train(const SyntheticTask& task, const TrainConfig& config);

// Held-out per-entry MSE on freshly sampled noiseless batches.
double evaluate(const AdapterNetwork& net, const NetworkTask& task,
                int n_samples, Rng& rng);
double evaluate(const AdapterPair& adapter, const SyntheticTask& task,
                int n_samples, Rng& rng);

}  // namespace aclora
