#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fcstgnn {

class ParamStore;

// Adam moments over the flat parameter layout.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState(int64_t param_count, double learning_rate)
      : m(static_cast<size_t>(param_count), 0.0),
        v(static_cast<size_t>(param_count), 0.0),
        lr(learning_rate) {}
};

// One bias-corrected Adam update in place; increments step_count. params and
// grads must match the state's length.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// Same update applied to a store's blocks through its flat layout.
void adam_step(ParamStore& store, std::span<const double> grads, AdamState& state);

}  // namespace fcstgnn
