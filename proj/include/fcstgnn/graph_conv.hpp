#pragma once

#include <vector>

#include "fcstgnn/params.hpp"
#include "fcstgnn/rng.hpp"
#include "fcstgnn/tape.hpp"

namespace fcstgnn {

// Half-open patch ranges [w*s, w*s + M) for w = 0 .. W-1,
// W = floor((patch_count - M)/s) + 1.
struct WindowPlan {
  int window_size = 0;
  int stride = 1;
  std::vector<int> starts;

  int count() const { return static_cast<int>(starts.size()); }
};

WindowPlan plan_windows(int patch_count, int window_size, int stride);

// True when every patch index in [0, patch_count) falls inside some window.
// False plans are legal (large strides skip patches); the CLI warns.
bool covers_all_patches(const WindowPlan& plan, int patch_count);

// Adjacency-weighted feature sum over the window: H = E * Z, both flattened
// to (M*N) rows.
Var mpnn_propagate(Var adjacency, Var z_window);

// Nonlinear update relu(H * W_g + b_g); the single graph-conv layer.
Var mpnn_update(Var h_window, Var w_g, Var b_g);

// Per-sensor mean over the window's M patch positions: (M*N) x d in,
// N x d out.
Var temporal_pool(Var z_updated, int window_patches, int sensors);

// Registers one branch's independent parameters:
// branch<k>.ws, branch<k>.wg (d x d), branch<k>.bg (d).
void add_branch_params(ParamStore& store, int branch, int feature_dim, const Rng& master);

}  // namespace fcstgnn
