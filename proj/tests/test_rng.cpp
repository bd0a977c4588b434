#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aclora/rng.hpp"

using aclora::Rng;

TEST_CASE("same seed gives identical streams") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forked streams are independent of parent consumption") {
  Rng parent(7);
  Rng child1 = parent.fork(3);
  parent.next_u64();
  Rng child2 = Rng(7).fork(3);
  for (int i = 0; i < 10; ++i) CHECK(child1.next_u64() == child2.next_u64());
}

TEST_CASE("distinct forks differ") {
  Rng parent(7);
  CHECK(parent.fork(0).next_u64() != parent.fork(1).next_u64());
}

TEST_CASE("uniform stays in [0, 1)") {
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian moments") {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
