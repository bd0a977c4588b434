#pragma once

#include <vector>

namespace aclora {

// Loss window and normalization state driving the restart threshold.
// window_losses holds the per-epoch losses accumulated since the last
// restart; reference_loss is the first-epoch average used to map raw MSE
// losses into (0, 1).
struct ScheduleState {
  std::vector<double> window_losses;
  int epoch = 0;
  int total_epochs = 1;
  double loss_floor = 1e-6;
  double loss_ceiling = 1.0 - 1e-6;
  double reference_loss = 0.0;
};

// epoch/total_epochs + 1, in [1, 2].
double alpha(int epoch, int total_epochs);

// clamp(mean(window) / reference, floor, ceiling)
double normalized_loss(const ScheduleState& state);

// p = 1 - l^alpha
double threshold(double l, double alpha);

}  // namespace aclora
