#include <cmath>
#include <vector>

#include "doctest.h"

#include "fcstgnn/adam.hpp"
#include "fcstgnn/errors.hpp"
#include "fcstgnn/rng.hpp"

using namespace fcstgnn;

TEST_CASE("zero gradients leave parameters untouched") {
  std::vector<double> params = {0.5, -1.25, 3.0};
  const std::vector<double> before = params;
  std::vector<double> grads(3, 0.0);
  AdamState state(3, 1e-3);
  for (int i = 0; i < 5; ++i) adam_step(params, grads, state);
  CHECK(state.step_count == 5);
  for (size_t i = 0; i < params.size(); ++i) CHECK(params[i] == before[i]);
}

TEST_CASE("first update from zero state has the closed form") {
  // With m = v = 0 and bias correction, step one moves by
  // -lr * g / (|g| + eps) regardless of the gradient's magnitude.
  std::vector<double> params = {0.0, 0.0, 0.0};
  std::vector<double> grads = {1.0, -1.0, 4.0};
  AdamState state(3, 1e-3);
  adam_step(params, grads, state);
  const double expected = -1e-3 / (1.0 + 1e-8);
  CHECK(std::abs(params[0] - expected) <= 1e-9);
  CHECK(std::abs(params[1] + expected) <= 1e-9);
  CHECK(std::abs(params[2] - (-1e-3 * 4.0 / (4.0 + 1e-8))) <= 1e-9);
}

TEST_CASE("two identical states evolve identically") {
  Rng rng(7);
  std::vector<double> pa(16), pb(16);
  for (size_t i = 0; i < pa.size(); ++i) pa[i] = pb[i] = rng.normal();
  AdamState sa(16, 3e-4), sb(16, 3e-4);
  for (int step = 0; step < 50; ++step) {
    std::vector<double> grads(16);
    for (double& g : grads) g = rng.normal();
    adam_step(pa, grads, sa);
    adam_step(pb, grads, sb);
  }
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i] == pb[i]);
    CHECK(sa.m[i] == sb.m[i]);
    CHECK(sa.v[i] == sb.v[i]);
  }
}

TEST_CASE("moments track the configured decay rates") {
  std::vector<double> params = {0.0};
  std::vector<double> grads = {2.0};
  AdamState state(1, 1e-3);
  adam_step(params, grads, state);
  CHECK(std::abs(state.m[0] - 0.1 * 2.0) <= 1e-15);
  CHECK(std::abs(state.v[0] - 0.001 * 4.0) <= 1e-15);
  adam_step(params, grads, state);
  CHECK(std::abs(state.m[0] - (0.9 * 0.2 + 0.1 * 2.0)) <= 1e-15);
  CHECK(std::abs(state.v[0] - (0.999 * 0.004 + 0.001 * 4.0)) <= 1e-15);
}

TEST_CASE("length mismatches are rejected") {
  std::vector<double> params = {0.0, 0.0};
  std::vector<double> grads = {1.0};
  AdamState state(2, 1e-3);
  CHECK_THROWS_AS(adam_step(params, grads, state), ShapeError);
  std::vector<double> params3 = {0.0, 0.0, 0.0};
  std::vector<double> grads3 = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(adam_step(params3, grads3, state), ShapeError);
}
