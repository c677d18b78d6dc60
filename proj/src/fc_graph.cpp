#include "fcstgnn/fc_graph.hpp"

#include <cassert>
#include <cstdlib>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

Tensor decay_matrix(int window_patches, int sensors, double delta) {
  assert(window_patches >= 1 && sensors >= 1);
  assert(delta > 0.0 && delta <= 1.0);
  // powers[k] = delta^k by repeated multiplication, so the mask entries are
  // bit-identical to what the invariant tests recompute.
  std::vector<double> powers(static_cast<size_t>(window_patches), 1.0);
  for (int k = 1; k < window_patches; ++k) {
    powers[static_cast<size_t>(k)] = powers[static_cast<size_t>(k - 1)] * delta;
  }
  const int n = window_patches * sensors;
  Tensor c({n, n});
  for (int t = 0; t < window_patches; ++t) {
    for (int r = 0; r < window_patches; ++r) {
      const double v = powers[static_cast<size_t>(std::abs(t - r))];
      for (int i = 0; i < sensors; ++i) {
        for (int j = 0; j < sensors; ++j) {
          c.at2(t * sensors + i, r * sensors + j) = v;
        }
      }
    }
  }
  return c;
}

Var window_scores(Var z_window, Var w_s) {
  Var projected = matmul(z_window, w_s);
  return matmul(projected, transpose_last2(projected));
}

Var build_window_adjacency(Var z_window, Var w_s, const Tensor& decay) {
  Var scores = window_scores(z_window, w_s);
  if (scores.value().shape != decay.shape) {
    throw ShapeError("build_window_adjacency: scores " + shape_str(scores.value().shape) +
                     " vs decay mask " + shape_str(decay.shape));
  }
  Var normalized = softmax_last(scores);
  return mul(normalized, z_window.tape->leaf(decay));
}

}  // namespace fcstgnn
