#pragma once

#include <cstdint>
#include <vector>

#include "aclora/adapter.hpp"
#include "aclora/spectral_restart.hpp"

namespace aclora {

// Per-restart spectrum snapshots for one run.
struct SpectrumTrace {
  struct Entry {
    int epoch;
    std::vector<std::vector<double>> per_layer_spectra;  // sorted descending
  };
  std::vector<Entry> entries;
};

SpectrumTrace trace_from_restarts(const std::vector<RestartReport>& restarts);

// Concentration experiment on the unit sphere: ratio of the norm of a sum of
// random unit vectors to the norm of a sum of a fixed unit vector.
struct SphereExperiment {
  int dimension;     // R
  int sample_count;  // lambda
  int trials;
  std::uint64_t seed;
};

struct SphereSummary {
  double mean_ratio;
  double std_ratio;
  double median_ratio;
  std::vector<double> ratios;  // per trial
};

// Smallest prefix whose cumulative squared singular values reach
// energy * total. Zero matrix -> 0.
int effective_rank(const Matrix& m, double energy);

// ||learned - truth||_F / max(||truth||_F, 1e-12)
double recovery_error(const Matrix& learned, const Matrix& truth);

SphereSummary sphere_ratio_experiment(const SphereExperiment& exp);

// E[chi(R)] = sqrt(2) * Gamma((R+1)/2) / Gamma(R/2), via log-gamma.
double chi_mean(int dimension);

}  // namespace aclora
