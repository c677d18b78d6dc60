#pragma once

#include "fcstgnn/tape.hpp"
#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

// Temporal decay mask over one window: entry [(t,i)][(r,j)] = delta^|t-r|,
// block-constant in the sensor indices. Row/column index = patch_offset*N + i
// with patch offsets local to the window. Plain constant, not on a tape.
Tensor decay_matrix(int window_patches, int sensors, double delta);

// Raw pairwise scores over a window's (M*N) x d feature rows:
// scores[(t,i)][(r,j)] = (z_{t,i} W_s) . (z_{r,j} W_s).
Var window_scores(Var z_window, Var w_s);

// Row-wise softmax of the scores, then elementwise decay mask. Rows sum to 1
// before the mask; the mask leaves same-patch entries untouched and scales
// cross-patch entries down, with no renormalization afterwards.
Var build_window_adjacency(Var z_window, Var w_s, const Tensor& decay);

}  // namespace fcstgnn
