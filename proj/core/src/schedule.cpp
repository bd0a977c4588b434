#include "aclora/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aclora {

double alpha(int epoch, int total_epochs) {
  if (total_epochs < 1) {
    throw std::invalid_argument("alpha: total_epochs must be >= 1");
  }
  if (epoch < 0 || epoch > total_epochs) {
    throw std::invalid_argument("alpha: epoch must lie in [0, total_epochs]");
  }
  return static_cast<double>(epoch) / static_cast<double>(total_epochs) + 1.0;
}

double normalized_loss(const ScheduleState& state) {
  if (state.window_losses.empty()) {
    throw std::runtime_error("normalized_loss: empty loss window");
  }
  if (!(state.reference_loss > 0.0)) {
    throw std::runtime_error("normalized_loss: reference loss must be > 0");
  }
  const double mean =
      std::accumulate(state.window_losses.begin(), state.window_losses.end(),
                      0.0) /
      static_cast<double>(state.window_losses.size());
  return std::clamp(mean / state.reference_loss, state.loss_floor,
                    state.loss_ceiling);
}

double threshold(double l, double alpha) {
  if (!(l > 0.0 && l < 1.0)) {
    throw std::invalid_argument("threshold: loss must lie in (0, 1)");
  }
  if (!(alpha >= 1.0)) {
    throw std::invalid_argument("threshold: alpha must be >= 1");
  }
  return 1.0 - std::pow(l, alpha);
}

}  // namespace aclora
