#pragma once

#include <string>
#include <vector>

#include "aclora/adapter.hpp"
#include "aclora/rng.hpp"

namespace aclora {

// Thin SVD triple: m = u * diag(d) * v, with v stored as rows (q x n).
struct SpectralFactors {
  Matrix u;  // m x q, orthonormal columns
  Vector d;  // length q, non-increasing, non-negative
  Matrix v;  // q x n, orthonormal rows
};

// Prefix of singular-value indices retained as signal; the complement is
// treated as noise. Always non-empty (the top value is never discarded).
struct SignalSplit {
  int signal_count;  // |S|; S = {0 .. signal_count-1}
  int total;         // q; N = {signal_count .. q-1}
  double threshold;  // p used to compute the split
};

struct LayerRestart {
  std::string layer_id;
  int retained;  // I after the union rule
  double sigma;  // refill noise std
  std::vector<double> pre_spectrum;
  std::vector<double> post_spectrum;
};

struct RestartReport {
  int epoch = 0;
  double threshold = 0.0;  // p
  double alpha = 0.0;
  std::vector<LayerRestart> per_layer;
};

// Scope of the retained-count union: across the two factors of one adapter
// pair, or across every factor of every adapter in the network.
enum class UnionScope { pair, global };

SpectralFactors svd(const Matrix& m);

// S = {i | cumulative squared energy through i < total * p}, clamped so the
// top singular value is always kept.
SignalSplit signal_indices(const Vector& d, double p);

// Zero the noise part of the spectrum, then add full-size Gaussian noise with
// the residual's entry-wise standard deviation. Returns (M', sigma).
std::pair<Matrix, double> restart_layer(const Matrix& m,
                                        const SignalSplit& split, Rng& rng);

// Restart both factors of one adapter with a shared retained count
// I = max over factors of |S|. Mutates the adapter in place.
RestartReport restart_module(AdapterPair& adapter, double p, Rng& rng);

// Restart every adapter of the network. With UnionScope::pair each adapter
// gets its own I; with UnionScope::global one I is shared network-wide.
RestartReport restart_network(AdapterNetwork& net, double p, UnionScope scope,
                              Rng& rng);

}  // namespace aclora
