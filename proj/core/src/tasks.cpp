#include "aclora/tasks.hpp"

#include <Eigen/QR>
#include <stdexcept>
#include <string>

namespace aclora {

namespace {

Matrix gaussian_matrix(int rows, int cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.gaussian(0.0, stddev);
  }
  return m;
}

// Thin orthonormal basis (rows x cols, cols <= rows) from a Gaussian draw,
// with the QR sign ambiguity fixed so the result is deterministic.
Matrix random_orthonormal(int rows, int cols, Rng& rng) {
  const Matrix g = gaussian_matrix(rows, cols, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

SyntheticTask make_task(int d, int k, int r_star,
                        const std::vector<double>& spectrum_profile,
                        double label_noise_std, std::uint64_t seed) {
  if (r_star < 0 || r_star > std::min(d, k)) {
    throw std::invalid_argument("make_task: r_star must lie in [0, min(d,k)]");
  }
  if (static_cast<int>(spectrum_profile.size()) != r_star) {
    throw std::invalid_argument(
        "make_task: spectrum_profile must have exactly r_star entries");
  }
  for (double s : spectrum_profile) {
    if (!(s > 0.0)) {
      throw std::invalid_argument(
          "make_task: spectrum_profile entries must be positive");
    }
  }

  SyntheticTask task;
  task.true_rank = r_star;
  task.spectrum_profile = spectrum_profile;
  task.label_noise_std = label_noise_std;
  task.seed = seed;

  Rng rng = Rng(seed).fork(0x7a5b);
  task.base = gaussian_matrix(d, k, 1.0, rng);
  if (r_star == 0) {
    task.true_update = Matrix::Zero(d, k);
  } else {
    const Matrix p = random_orthonormal(d, r_star, rng);
    const Matrix q = random_orthonormal(k, r_star, rng);
    Vector profile(r_star);
    for (int i = 0; i < r_star; ++i) profile[i] = spectrum_profile[i];
    task.true_update = p * profile.asDiagonal() * q.transpose();
  }
  return task;
}

Batch sample_batch(const SyntheticTask& task, int batch_size, Rng& rng) {
  if (batch_size < 1) {
    throw std::invalid_argument("sample_batch: batch_size must be >= 1");
  }
  Batch batch;
  batch.inputs = gaussian_matrix(batch_size, task.in_dim(), task.input_std, rng);
  const Matrix teacher = task.base + task.true_update;
  batch.targets = batch.inputs * teacher.transpose();
  if (task.label_noise_std > 0.0) {
    batch.targets += gaussian_matrix(batch_size, task.out_dim(),
                                     task.label_noise_std, rng);
  }
  return batch;
}

Batch sample_batch(const NetworkTask& task, int batch_size, Rng& rng) {
  if (task.layers.empty()) {
    throw std::invalid_argument("sample_batch: network task has no layers");
  }
  Batch batch;
  batch.inputs = gaussian_matrix(batch_size, task.layers.front().in_dim(),
                                 task.layers.front().input_std, rng);
  Matrix h = batch.inputs;
  for (const auto& layer : task.layers) {
    h = h * (layer.base + layer.true_update).transpose();
  }
  batch.targets = std::move(h);
  if (task.label_noise_std > 0.0) {
    batch.targets += gaussian_matrix(
        batch_size, task.layers.back().out_dim(), task.label_noise_std, rng);
  }
  return batch;
}

std::vector<double> default_profile(int r_star) {
  std::vector<double> profile(r_star);
  for (int i = 0; i < r_star; ++i) {
    profile[i] = static_cast<double>(r_star - i);
  }
  return profile;
}

}  // namespace aclora
