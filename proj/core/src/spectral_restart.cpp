#include "aclora/spectral_restart.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace aclora {

namespace {

double entry_stddev(const Matrix& m) {
  const double mean = m.mean();
  return std::sqrt((m.array() - mean).square().mean());
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Truncate the spectrum to its top `retained` values, refill with full-size
// Gaussian noise at the residual's std, and overwrite the factor matrix.
LayerRestart apply_restart(Matrix& m, const SpectralFactors& factors,
                           int retained, std::string layer_id, Rng& rng) {
  Vector truncated = factors.d;
  for (int i = retained; i < truncated.size(); ++i) truncated[i] = 0.0;
  const Matrix kept = factors.u * truncated.asDiagonal() * factors.v;
  const Matrix residual = m - kept;
  const double sigma = entry_stddev(residual);

  Matrix noise(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < noise.cols(); ++j) {
    for (Eigen::Index i = 0; i < noise.rows(); ++i) {
      noise(i, j) = rng.gaussian(0.0, sigma);
    }
  }
  m = kept + noise;

  LayerRestart record;
  record.layer_id = std::move(layer_id);
  record.retained = retained;
  record.sigma = sigma;
  record.pre_spectrum = to_std(factors.d);
  record.post_spectrum = to_std(svd(m).d);
  return record;
}

}  // namespace

SpectralFactors svd(const Matrix& m) {
  if (!m.allFinite()) {
    throw std::runtime_error("svd: matrix has non-finite entries");
  }
  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("svd: decomposition did not converge");
  }
  SpectralFactors factors;
  factors.u = solver.matrixU();
  factors.d = solver.singularValues();
  factors.v = solver.matrixV().transpose();
  return factors;
}

SignalSplit signal_indices(const Vector& d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("signal_indices: p must lie in [0, 1]");
  }
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0 || (i > 0 && d[i] > d[i - 1])) {
      throw std::invalid_argument(
          "signal_indices: spectrum must be non-increasing and non-negative");
    }
  }
  const double total = d.squaredNorm();
  double running = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    running += d[i] * d[i];
    if (running < total * p) ++count;
  }
  if (count < 1) count = 1;  // never erase the strongest direction

  SignalSplit split;
  split.signal_count = count;
  split.total = static_cast<int>(d.size());
  split.threshold = p;
  return split;
}

std::pair<Matrix, double> restart_layer(const Matrix& m,
                                        const SignalSplit& split, Rng& rng) {
  const int q = static_cast<int>(std::min(m.rows(), m.cols()));
  if (split.total != q) {
    throw std::invalid_argument(
        "restart_layer: split does not match matrix dimensions");
  }
  const SpectralFactors factors = svd(m);
  Matrix copy = m;
  LayerRestart record =
      apply_restart(copy, factors, split.signal_count, "layer", rng);
  return {copy, record.sigma};
}

RestartReport restart_module(AdapterPair& adapter, double p, Rng& rng) {
  const SpectralFactors up_factors = svd(adapter.up);
  const SpectralFactors down_factors = svd(adapter.down);
  const SignalSplit up_split = signal_indices(up_factors.d, p);
  const SignalSplit down_split = signal_indices(down_factors.d, p);
  // Each split is a prefix, so the union across the pair is the longer one.
  const int retained = std::max(up_split.signal_count, down_split.signal_count);

  RestartReport report;
  report.threshold = p;
  report.per_layer.push_back(
      apply_restart(adapter.up, up_factors, retained, "up", rng));
  report.per_layer.push_back(
      apply_restart(adapter.down, down_factors, retained, "down", rng));
  return report;
}

RestartReport restart_network(AdapterNetwork& net, double p, UnionScope scope,
                              Rng& rng) {
  struct FactorState {
    Matrix* matrix;
    SpectralFactors factors;
    int signal_count;
    std::string id;
  };
  std::vector<FactorState> states;
  std::vector<int> pair_retained(net.layers.size(), 0);

  for (std::size_t j = 0; j < net.layers.size(); ++j) {
    AdapterPair& layer = net.layers[j];
    for (Matrix* m : {&layer.up, &layer.down}) {
      FactorState state;
      state.matrix = m;
      state.factors = svd(*m);
      state.signal_count = signal_indices(state.factors.d, p).signal_count;
      state.id = "layer" + std::to_string(j) +
                 (m == &layer.up ? ".up" : ".down");
      pair_retained[j] = std::max(pair_retained[j], state.signal_count);
      states.push_back(std::move(state));
    }
  }

  int global_retained = 0;
  for (int r : pair_retained) global_retained = std::max(global_retained, r);

  RestartReport report;
  report.threshold = p;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const int retained = scope == UnionScope::global
                             ? global_retained
                             : pair_retained[s / 2];
    report.per_layer.push_back(apply_restart(
        *states[s].matrix, states[s].factors, retained, states[s].id, rng));
  }
  return report;
}

}  // namespace aclora
