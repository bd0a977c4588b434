#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aclora/spectral_restart.hpp"
#include "aclora/tasks.hpp"

using namespace aclora;

TEST_CASE("rank zero task has a zero update") {
  const SyntheticTask task = make_task(8, 8, 0, {}, 0.0, 1);
  CHECK(task.true_update.isZero(0.0));
}

TEST_CASE("constructed update has the requested spectrum") {
  const SyntheticTask task = make_task(32, 32, 4, {4, 3, 2, 1}, 0.0, 7);
  const Vector d = svd(task.true_update).d;
  CHECK(d[0] == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(d[1] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(d[2] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(d[3] == doctest::Approx(1.0).epsilon(1e-8));
  // exact rank: everything past r* is numerically zero
  for (int i = 4; i < 32; ++i) CHECK(d[i] <= 1e-10 * d[0]);
  CHECK(task.true_rank == 4);
}

TEST_CASE("task construction is deterministic") {
  const SyntheticTask a = make_task(16, 12, 3, {3, 2, 1}, 0.1, 99);
  const SyntheticTask b = make_task(16, 12, 3, {3, 2, 1}, 0.1, 99);
  CHECK(a.base == b.base);
  CHECK(a.true_update == b.true_update);
}

TEST_CASE("make_task rejects bad shapes") {
  CHECK_THROWS_AS(make_task(4, 4, 5, {1, 1, 1, 1, 1}, 0.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_task(8, 8, 2, {1.0}, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_task(8, 8, 1, {-1.0}, 0.0, 0), std::invalid_argument);
}

TEST_CASE("noiseless targets are exact") {
  const SyntheticTask task = make_task(6, 5, 2, {2, 1}, 0.0, 3);
  Rng rng(1);
  const Batch batch = sample_batch(task, 4, rng);
  const Matrix expected =
      batch.inputs * (task.base + task.true_update).transpose();
  CHECK((batch.targets - expected).norm() == 0.0);
}

TEST_CASE("batch shapes follow the task dims") {
  const SyntheticTask task = make_task(7, 2, 1, {1.0}, 0.0, 5);
  Rng rng(2);
  const Batch batch = sample_batch(task, 1, rng);
  CHECK(batch.inputs.rows() == 1);
  CHECK(batch.inputs.cols() == 2);
  CHECK(batch.targets.rows() == 1);
  CHECK(batch.targets.cols() == 7);
}

TEST_CASE("label noise std is realized") {
  const SyntheticTask task = make_task(4, 4, 1, {1.0}, 0.1, 11);
  Rng rng(3);
  const int n = 100000;
  const Batch batch = sample_batch(task, n, rng);
  const Matrix clean = batch.inputs * (task.base + task.true_update).transpose();
  const Matrix residual = batch.targets - clean;
  const double std = std::sqrt(residual.array().square().mean());
  CHECK(std == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("default profile decays linearly") {
  const auto profile = default_profile(4);
  REQUIRE(profile.size() == 4);
  CHECK(profile[0] == 4.0);
  CHECK(profile[3] == 1.0);
}

TEST_CASE("network task composes teacher layers") {
  NetworkTask task;
  task.layers.push_back(make_task(6, 8, 1, {2.0}, 0.0, 1));
  task.layers.push_back(make_task(4, 6, 1, {1.0}, 0.0, 2));
  Rng rng(5);
  const Batch batch = sample_batch(task, 3, rng);
  CHECK(batch.inputs.cols() == 8);
  CHECK(batch.targets.cols() == 4);
  const Matrix t0 = task.layers[0].base + task.layers[0].true_update;
  const Matrix t1 = task.layers[1].base + task.layers[1].true_update;
  const Matrix expected = batch.inputs * t0.transpose() * t1.transpose();
  CHECK((batch.targets - expected).norm() <= 1e-10 * expected.norm());
}
