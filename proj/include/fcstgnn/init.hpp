#pragma once

#include <utility>

#include "fcstgnn/rng.hpp"
#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

// Uniform [-bound, bound] fill, consumed in flat element order.
inline Tensor uniform_init(Rng& rng, Shape shape, double bound) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace fcstgnn
