#include "aclora/adapter.hpp"

#include <stdexcept>
#include <string>

namespace aclora {

AdapterPair init_adapter(int d, int k, int max_rank, std::uint64_t seed) {
  if (d <= 0 || k <= 0 || max_rank <= 0) {
    throw std::invalid_argument("init_adapter: dimensions must be positive");
  }
  if (max_rank > std::min(d, k)) {
    throw std::invalid_argument(
        "init_adapter: max_rank " + std::to_string(max_rank) +
        " exceeds min(d,k) = " + std::to_string(std::min(d, k)));
  }
  AdapterPair adapter;
  adapter.base = Matrix::Zero(d, k);
  adapter.up = Matrix::Zero(d, max_rank);
  adapter.down = Matrix(max_rank, k);
  adapter.max_rank = max_rank;

  Rng rng(seed);
  const double stddev = 1.0 / static_cast<double>(max_rank);
  for (int i = 0; i < max_rank; ++i) {
    for (int j = 0; j < k; ++j) {
      adapter.down(i, j) = rng.gaussian(0.0, stddev);
    }
  }
  return adapter;
}

Vector forward(const AdapterPair& adapter, const Vector& x) {
  if (x.size() != adapter.base.cols()) {
    throw std::invalid_argument("forward: input length " +
                                std::to_string(x.size()) + " != " +
                                std::to_string(adapter.base.cols()));
  }
  return adapter.base * x + adapter.up * (adapter.down * x);
}

Vector forward(const AdapterNetwork& net, const Vector& x) {
  Vector h = x;
  for (const auto& layer : net.layers) h = forward(layer, h);
  return h;
}

Matrix effective_update(const AdapterPair& adapter) {
  return adapter.up * adapter.down;
}

}  // namespace aclora
