#include "fcstgnn/graph_conv.hpp"

#include <cmath>
#include <string>

#include "fcstgnn/errors.hpp"
#include "fcstgnn/init.hpp"

namespace fcstgnn {

WindowPlan plan_windows(int patch_count, int window_size, int stride) {
  if (window_size < 1 || window_size > patch_count) {
    throw ConfigError("plan_windows: window size " + std::to_string(window_size) +
                      " outside [1, " + std::to_string(patch_count) + "]");
  }
  if (stride < 1) {
    throw ConfigError("plan_windows: stride " + std::to_string(stride) + " must be >= 1");
  }
  WindowPlan plan;
  plan.window_size = window_size;
  plan.stride = stride;
  const int count = (patch_count - window_size) / stride + 1;
  plan.starts.reserve(static_cast<size_t>(count));
  for (int w = 0; w < count; ++w) plan.starts.push_back(w * stride);
  return plan;
}

bool covers_all_patches(const WindowPlan& plan, int patch_count) {
  std::vector<char> covered(static_cast<size_t>(patch_count), 0);
  for (int start : plan.starts) {
    for (int t = start; t < start + plan.window_size; ++t) {
      covered[static_cast<size_t>(t)] = 1;
    }
  }
  for (char c : covered) {
    if (!c) return false;
  }
  return true;
}

Var mpnn_propagate(Var adjacency, Var z_window) { return matmul(adjacency, z_window); }

Var mpnn_update(Var h_window, Var w_g, Var b_g) {
  return relu(add(matmul(h_window, w_g), b_g));
}

Var temporal_pool(Var z_updated, int window_patches, int sensors) {
  const Tensor& z = z_updated.value();
  if (z.rank() != 2 || z.rows() != window_patches * sensors) {
    throw ShapeError("temporal_pool: expected " + std::to_string(window_patches * sensors) +
                     " rows, got shape " + shape_str(z.shape));
  }
  const int d = z.cols();
  // Rows are patch-major, so each patch's N*d block is contiguous.
  Var stacked = reshape(z_updated, {window_patches, sensors * d});
  return reshape(mean_axis(stacked, 0), {sensors, d});
}

void add_branch_params(ParamStore& store, int branch, int feature_dim, const Rng& master) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  const std::string prefix = "branch" + std::to_string(branch) + ".";
  for (const char* leaf_name : {"ws", "wg", "bg"}) {
    const std::string name = prefix + leaf_name;
    Rng rng = master.derive("init/" + name);
    const Shape shape = leaf_name[0] == 'b' ? Shape{feature_dim}
                                            : Shape{feature_dim, feature_dim};
    store.add(name, uniform_init(rng, shape, bound));
  }
}

}  // namespace fcstgnn
