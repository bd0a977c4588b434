#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aclora/schedule.hpp"

using namespace aclora;

TEST_CASE("alpha endpoints and midpoint") {
  CHECK(alpha(0, 100) == 1.0);
  CHECK(alpha(50, 100) == 1.5);
  CHECK(alpha(100, 100) == 2.0);
}

TEST_CASE("alpha is affine with step 1/T") {
  const int T = 100;
  for (int e = 0; e < T; ++e) {
    CHECK(std::abs(alpha(e + 1, T) - alpha(e, T) - 1.0 / T) <= 1e-15);
  }
}

TEST_CASE("alpha domain errors") {
  CHECK_THROWS_AS(alpha(101, 100), std::invalid_argument);
  CHECK_THROWS_AS(alpha(-1, 100), std::invalid_argument);
  CHECK_THROWS_AS(alpha(0, 0), std::invalid_argument);
}

TEST_CASE("normalized loss clamps and divides") {
  ScheduleState state;
  state.reference_loss = 2.0;

  state.window_losses = {0.5};
  CHECK(normalized_loss(state) == doctest::Approx(0.25));

  state.window_losses = {2.0};
  CHECK(normalized_loss(state) == 1.0 - 1e-6);  // ratio 1 hits the ceiling

  state.window_losses = {0.0};
  CHECK(normalized_loss(state) == 1e-6);
}

TEST_CASE("normalized loss uses the window mean") {
  ScheduleState state;
  state.reference_loss = 1.0;
  state.window_losses = {0.1, 0.2, 0.3};
  CHECK(normalized_loss(state) == doctest::Approx(0.2));
}

TEST_CASE("normalized loss rejects an empty window") {
  ScheduleState state;
  state.reference_loss = 1.0;
  CHECK_THROWS_AS(normalized_loss(state), std::runtime_error);
}

TEST_CASE("threshold formula") {
  CHECK(threshold(0.25, 1.5) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(threshold(0.5, 1.0) == doctest::Approx(0.5));
  // early training: loss near 1 keeps almost nothing
  CHECK(threshold(1.0 - 1e-9, 1.0) < 1e-8);
}

TEST_CASE("threshold domain errors") {
  CHECK_THROWS_AS(threshold(0.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(threshold(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(threshold(0.5, 0.9), std::invalid_argument);
}

TEST_CASE("threshold monotonicity") {
  double prev = 1.0;
  for (double l = 0.05; l < 1.0; l += 0.05) {
    const double p = threshold(l, 1.5);
    CHECK(p < prev);
    prev = p;
  }
  prev = 0.0;
  for (double a = 1.0; a <= 2.0; a += 0.1) {
    const double p = threshold(0.3, a);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("p is non-decreasing over epochs at fixed loss") {
  double prev = 0.0;
  for (int e = 0; e <= 100; e += 10) {
    const double p = threshold(0.4, alpha(e, 100));
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("normalized loss stays inside its clamp bounds") {
  ScheduleState state;
  state.reference_loss = 0.7;
  for (double loss : {0.0, 1e-9, 0.1, 0.7, 5.0, 1e9}) {
    state.window_losses = {loss};
    const double l = normalized_loss(state);
    CHECK(l >= state.loss_floor);
    CHECK(l <= state.loss_ceiling);
  }
}
