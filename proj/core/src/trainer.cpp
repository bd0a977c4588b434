#include "aclora/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace aclora {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct AdamState {
  Matrix m_up, v_up, m_down, v_down;
  long step = 0;

  void reset(const AdapterPair& adapter) {
    m_up = Matrix::Zero(adapter.up.rows(), adapter.up.cols());
    v_up = m_up;
    m_down = Matrix::Zero(adapter.down.rows(), adapter.down.cols());
    v_down = m_down;
    step = 0;
  }
};

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v,
                 long step, const AdamParams& hp, double lr) {
  m = hp.beta1 * m + (1.0 - hp.beta1) * grad;
  v = hp.beta2 * v.array().matrix() +
      (1.0 - hp.beta2) * grad.array().square().matrix();
  const double bias1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
  const double bias2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
  param.array() -=
      lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + hp.epsilon);
}

}  // namespace

void TrainConfig::validate() const {
  if (total_epochs < 1) throw std::invalid_argument("total_epochs must be >= 1");
  if (restart_interval < 1) {
    throw std::invalid_argument("restart_interval must be >= 1");
  }
  if (batches_per_epoch < 1) {
    throw std::invalid_argument("batches_per_epoch must be >= 1");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  if (max_rank < 1) throw std::invalid_argument("max_rank must be >= 1");
}

TrainingDivergence::TrainingDivergence(int epoch_, double last_finite_loss_)
    : std::runtime_error("training diverged at epoch " +
                         std::to_string(epoch_) + " (last finite loss " +
                         std::to_string(last_finite_loss_) + ")"),
      epoch(epoch_),
      last_finite_loss(last_finite_loss_) {}

TrainRecord train(const NetworkTask& task, const TrainConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n_layers = task.layers.size();
  Rng root(config.seed);
  Rng data_rng = root.fork(1);
  Rng restart_rng = root.fork(2);
  Rng init_seeds = root.fork(4);

  AdapterNetwork net;
  for (const auto& layer_task : task.layers) {
    AdapterPair adapter = init_adapter(layer_task.out_dim(),
                                       layer_task.in_dim(), config.max_rank,
                                       init_seeds.next_u64());
    adapter.base = layer_task.base;
    net.layers.push_back(std::move(adapter));
  }

  std::vector<AdamState> adam(n_layers);
  for (std::size_t j = 0; j < n_layers; ++j) adam[j].reset(net.layers[j]);

  ScheduleState schedule;
  schedule.total_epochs = config.total_epochs;
  schedule.loss_floor = config.loss_floor;
  schedule.loss_ceiling = config.loss_ceiling;

  TrainRecord record;
  std::vector<int> retained(n_layers, config.max_rank);
  double last_finite_loss = 0.0;
  const int out_dim = task.layers.back().out_dim();

  for (int epoch = 1; epoch <= config.total_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int b = 0; b < config.batches_per_epoch; ++b) {
      Batch batch = sample_batch(task, config.batch_size, data_rng);
      const Matrix inputs = batch.inputs.transpose();    // k x batch
      const Matrix targets = batch.targets.transpose();  // d x batch

      // Forward, keeping per-layer activations for the backward pass.
      std::vector<Matrix> activations;
      activations.reserve(n_layers + 1);
      activations.push_back(inputs);
      for (const auto& layer : net.layers) {
        const Matrix& h = activations.back();
        activations.push_back(layer.base * h + layer.up * (layer.down * h));
      }

      const Matrix residual = activations.back() - targets;
      const double denom =
          static_cast<double>(config.batch_size) * out_dim;
      loss_sum += residual.squaredNorm() / denom;

      // Closed-form gradients of the per-entry MSE through the linear
      // stack: delta_L = 2/(batch*d) * residual, then
      //   dL/d(up_j)   = delta_j * (down_j * h_{j-1})^T
      //   dL/d(down_j) = up_j^T * delta_j * h_{j-1}^T
      //   delta_{j-1}  = (base_j + up_j*down_j)^T * delta_j
      Matrix delta = (2.0 / denom) * residual;
      for (std::size_t j = n_layers; j-- > 0;) {
        AdapterPair& layer = net.layers[j];
        const Matrix& h_in = activations[j];
        const Matrix projected = layer.down * h_in;
        const Matrix grad_up = delta * projected.transpose();
        const Matrix grad_down =
            layer.up.transpose() * delta * h_in.transpose();
        if (j > 0) {
          delta = (layer.base + layer.up * layer.down).transpose() * delta;
        }
        if (config.optimizer == Optimizer::sgd) {
          layer.up -= config.learning_rate * grad_up;
          layer.down -= config.learning_rate * grad_down;
        } else {
          ++adam[j].step;
          adam_update(layer.up, grad_up, adam[j].m_up, adam[j].v_up,
                      adam[j].step, config.adam, config.learning_rate);
          adam_update(layer.down, grad_down, adam[j].m_down, adam[j].v_down,
                      adam[j].step, config.adam, config.learning_rate);
        }
      }
    }

    const double epoch_loss = loss_sum / config.batches_per_epoch;
    if (!std::isfinite(epoch_loss)) {
      throw TrainingDivergence(epoch, last_finite_loss);
    }
    last_finite_loss = epoch_loss;
    schedule.window_losses.push_back(epoch_loss);
    schedule.epoch = epoch;
    if (epoch == 1) {
      schedule.reference_loss = std::max(epoch_loss, 1e-300);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss;
    Rng eval_rng = root.fork(3).fork(static_cast<std::uint64_t>(epoch));
    stats.eval_loss =
        evaluate(net, task, config.eval_samples_per_epoch, eval_rng);
    stats.p = kNaN;
    stats.alpha = kNaN;

    const bool fire = config.mode == TrainMode::ac_lora &&
                      epoch % config.restart_interval == 0 &&
                      epoch < config.total_epochs;
    if (fire) {
      const double l = normalized_loss(schedule);
      const double a = alpha(epoch, config.total_epochs);
      const double p = threshold(l, a);
      RestartReport report =
          restart_network(net, p, config.union_scope, restart_rng);
      report.epoch = epoch;
      report.alpha = a;
      for (std::size_t j = 0; j < n_layers; ++j) {
        retained[j] = report.per_layer[2 * j].retained;
      }
      record.restarts.push_back(std::move(report));
      schedule.window_losses.clear();
      // Stale Adam moments refer to erased directions.
      for (std::size_t j = 0; j < n_layers; ++j) adam[j].reset(net.layers[j]);
      stats.p = p;
      stats.alpha = a;
    }

    stats.retained = retained;
    record.epochs.push_back(std::move(stats));
  }

  record.adapters = std::move(net);
  record.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

TrainRecord train(const SyntheticTask& task, const TrainConfig& config) {
  NetworkTask wrapped;
  wrapped.layers.push_back(task);
  wrapped.label_noise_std = task.label_noise_std;
  return train(wrapped, config);
}

double evaluate(const AdapterNetwork& net, const NetworkTask& task,
                int n_samples, Rng& rng) {
  if (n_samples < 1) {
    throw std::invalid_argument("evaluate: n_samples must be >= 1");
  }
  NetworkTask noiseless = task;
  noiseless.label_noise_std = 0.0;
  const int out_dim = task.layers.back().out_dim();

  double total = 0.0;
  int remaining = n_samples;
  while (remaining > 0) {
    const int chunk = std::min(remaining, 1024);
    Batch batch = sample_batch(noiseless, chunk, rng);
    const Matrix inputs = batch.inputs.transpose();
    Matrix h = inputs;
    for (const auto& layer : net.layers) {
      h = layer.base * h + layer.up * (layer.down * h);
    }
    total += (h - batch.targets.transpose()).squaredNorm();
    remaining -= chunk;
  }
  return total / (static_cast<double>(n_samples) * out_dim);
}

double evaluate(const AdapterPair& adapter, const SyntheticTask& task,
                int n_samples, Rng& rng) {
  NetworkTask wrapped;
  wrapped.layers.push_back(task);
  AdapterNetwork net;
  net.layers.push_back(adapter);
  return evaluate(net, wrapped, n_samples, rng);
}

}  // namespace aclora
