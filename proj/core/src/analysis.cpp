#include "aclora/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aclora {

SpectrumTrace trace_from_restarts(const std::vector<RestartReport>& restarts) {
  SpectrumTrace trace;
  for (const auto& report : restarts) {
    SpectrumTrace::Entry entry;
    entry.epoch = report.epoch;
    for (const auto& layer : report.per_layer) {
      entry.per_layer_spectra.push_back(layer.post_spectrum);
    }
    trace.entries.push_back(std::move(entry));
  }
  return trace;
}

int effective_rank(const Matrix& m, double energy) {
  if (!(energy > 0.0 && energy <= 1.0)) {
    throw std::invalid_argument("effective_rank: energy must lie in (0, 1]");
  }
  const Vector d = svd(m).d;
  const double total = d.squaredNorm();
  if (total == 0.0) return 0;
  double running = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    running += d[i] * d[i];
    if (running >= energy * total) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(d.size());
}

double recovery_error(const Matrix& learned, const Matrix& truth) {
  if (learned.rows() != truth.rows() || learned.cols() != truth.cols()) {
    throw std::invalid_argument("recovery_error: shape mismatch");
  }
  return (learned - truth).norm() / std::max(truth.norm(), 1e-12);
}

double chi_mean(int dimension) {
  const double r = static_cast<double>(dimension);
  return std::sqrt(2.0) *
         std::exp(std::lgamma((r + 1.0) / 2.0) - std::lgamma(r / 2.0));
}

SphereSummary sphere_ratio_experiment(const SphereExperiment& exp) {
  if (exp.dimension < 1 || exp.sample_count < 1 || exp.trials < 1) {
    throw std::invalid_argument(
        "sphere_ratio_experiment: dimension, sample_count and trials must be "
        ">= 1");
  }
  SphereSummary summary;
  summary.ratios.resize(exp.trials);

  for (int t = 0; t < exp.trials; ++t) {
    // Partitioned substream per trial so parallel execution would merge
    // deterministically by trial index.
    Rng rng = Rng(exp.seed).fork(static_cast<std::uint64_t>(t));
    Vector sum = Vector::Zero(exp.dimension);
    for (int s = 0; s < exp.sample_count; ++s) {
      Vector x(exp.dimension);
      for (int i = 0; i < exp.dimension; ++i) x[i] = rng.gaussian();
      double norm = x.norm();
      while (norm == 0.0) {  // astronomically unlikely, but keep it defined
        for (int i = 0; i < exp.dimension; ++i) x[i] = rng.gaussian();
        norm = x.norm();
      }
      sum += x / norm;
    }
    // The fixed vector contributes norm lambda to the denominator.
    summary.ratios[t] = sum.norm() / static_cast<double>(exp.sample_count);
  }

  double mean = 0.0;
  for (double r : summary.ratios) mean += r;
  mean /= exp.trials;
  double var = 0.0;
  for (double r : summary.ratios) var += (r - mean) * (r - mean);
  var /= exp.trials;

  std::vector<double> sorted = summary.ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  summary.median_ratio = n % 2 == 1
                             ? sorted[n / 2]
                             : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  summary.mean_ratio = mean;
  summary.std_ratio = std::sqrt(var);
  return summary;
}

}  // namespace aclora
