#include "fcstgnn/adam.hpp"

#include <cmath>

#include "fcstgnn/errors.hpp"
#include "fcstgnn/params.hpp"

namespace fcstgnn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != state.m.size() || grads.size() != state.m.size()) {
    throw ShapeError("adam_step: params " + std::to_string(params.size()) + ", grads " +
                     std::to_string(grads.size()) + ", state " +
                     std::to_string(state.m.size()) + " lengths differ");
  }
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

void adam_step(ParamStore& store, std::span<const double> grads, AdamState& state) {
  std::vector<double> flat = store.flatten();
  adam_step(flat, grads, state);
  store.load_flat(flat);
}

}  // namespace fcstgnn
