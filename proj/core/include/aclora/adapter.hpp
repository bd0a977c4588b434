#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "aclora/rng.hpp"

namespace aclora {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One low-rank adapter: a frozen base matrix plus the trainable factor pair.
// The effective update is up * down (d x R times R x k); right after
// init_adapter it is exactly zero because up starts as the zero matrix.
struct AdapterPair {
  Matrix base;   // d x k, never touched by training or restarts
  Matrix up;     // d x R
  Matrix down;   // R x k
  int max_rank;  // R

  int out_dim() const { return static_cast<int>(base.rows()); }
  int in_dim() const { return static_cast<int>(base.cols()); }
};

// Ordered stack of adapters; layer j feeds layer j+1.
struct AdapterNetwork {
  std::vector<AdapterPair> layers;
};

// down ~ Gaussian(0, 1/R), up = 0. base defaults to zero; tasks install
// their own base matrix after construction.
AdapterPair init_adapter(int d, int k, int max_rank, std::uint64_t seed);

// y = base*x + up*(down*x)
Vector forward(const AdapterPair& adapter, const Vector& x);

Vector forward(const AdapterNetwork& net, const Vector& x);

// up * down, rank at most max_rank.
Matrix effective_update(const AdapterPair& adapter);

}  // namespace aclora
