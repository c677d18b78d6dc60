#pragma once

#include <vector>

#include "fcstgnn/params.hpp"
#include "fcstgnn/rng.hpp"
#include "fcstgnn/tape.hpp"
#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

// Sensor-major input (N x L) to patch-major output (L_hat x N x f) with
// L_hat = floor(L / patch_size); trailing L - L_hat*f timesteps are dropped.
// patches[t][i] = values[i][t*f .. (t+1)*f).
Tensor segment_patches(const Tensor& values, int patch_size);

// Sinusoidal position code for patch index t: component 2k is sin(w_k t),
// component 2k+1 is cos(w_k t), w_k = 10000^(-2k/d). An odd d ends on the
// sin branch for k = (d-1)/2.
std::vector<double> positional_vector(int t, int d);

// Position codes laid out to add directly onto the encoded feature grid:
// (patch_count * sensors) x d, where row t*sensors + i holds the code for t.
Tensor positional_grid(int patch_count, int sensors, int d);

// Registers the shared sensor-level encoder, a two-layer MLP per patch slice:
// enc.w1 (f x d), enc.b1, enc.w2 (d x d), enc.b2.
void add_encoder_params(ParamStore& store, int patch_size, int feature_dim, const Rng& master);

// Runs the shared encoder over every (patch, sensor) slice and adds the
// positional code of the slice's patch. Returns the (L_hat*N) x d grid on the
// tape, row index t*N + i.
Var encode_and_position(Tape& tape, const ParamStore& store, const Tensor& patches);

}  // namespace fcstgnn
