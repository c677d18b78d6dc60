#include "fcstgnn/patch_encoder.hpp"

#include <cmath>
#include <string>

#include "fcstgnn/errors.hpp"
#include "fcstgnn/init.hpp"

namespace fcstgnn {

Tensor segment_patches(const Tensor& values, int patch_size) {
  if (values.rank() != 2) {
    throw ShapeError("segment_patches: values must be sensors x timesteps, got shape " +
                     shape_str(values.shape));
  }
  const int sensors = values.rows();
  const int timesteps = values.cols();
  if (patch_size <= 0 || patch_size > timesteps) {
    throw ConfigError("segment_patches: patch size " + std::to_string(patch_size) +
                      " outside [1, " + std::to_string(timesteps) + "]");
  }
  const int patch_count = timesteps / patch_size;
  Tensor out({patch_count, sensors, patch_size});
  for (int t = 0; t < patch_count; ++t) {
    for (int i = 0; i < sensors; ++i) {
      for (int k = 0; k < patch_size; ++k) {
        out.at3(t, i, k) = values.at2(i, t * patch_size + k);
      }
    }
  }
  return out;
}

std::vector<double> positional_vector(int t, int d) {
  std::vector<double> p(static_cast<size_t>(d));
  for (int m = 0; m < d; ++m) {
    const int k = m / 2;
    const double omega = std::pow(10000.0, -2.0 * k / d);
    const double angle = omega * t;
    p[static_cast<size_t>(m)] = (m % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return p;
}

Tensor positional_grid(int patch_count, int sensors, int d) {
  Tensor grid({patch_count * sensors, d});
  for (int t = 0; t < patch_count; ++t) {
    const std::vector<double> p = positional_vector(t, d);
    for (int i = 0; i < sensors; ++i) {
      for (int m = 0; m < d; ++m) grid.at2(t * sensors + i, m) = p[static_cast<size_t>(m)];
    }
  }
  return grid;
}

void add_encoder_params(ParamStore& store, int patch_size, int feature_dim, const Rng& master) {
  const double b_in = 1.0 / std::sqrt(static_cast<double>(patch_size));
  const double b_hid = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  Rng w1 = master.derive("init/enc.w1");
  Rng b1 = master.derive("init/enc.b1");
  Rng w2 = master.derive("init/enc.w2");
  Rng b2 = master.derive("init/enc.b2");
  store.add("enc.w1", uniform_init(w1, {patch_size, feature_dim}, b_in));
  store.add("enc.b1", uniform_init(b1, {feature_dim}, b_in));
  store.add("enc.w2", uniform_init(w2, {feature_dim, feature_dim}, b_hid));
  store.add("enc.b2", uniform_init(b2, {feature_dim}, b_hid));
}

Var encode_and_position(Tape& tape, const ParamStore& store, const Tensor& patches) {
  if (patches.rank() != 3) {
    throw ShapeError("encode_and_position: patches must be patches x sensors x width, "
                     "got shape " + shape_str(patches.shape));
  }
  const int patch_count = patches.extent(0);
  const int sensors = patches.extent(1);
  const int width = patches.extent(2);
  const Tensor& w1v = store.value("enc.w1");
  if (w1v.rows() != width) {
    throw ShapeError("encode_and_position: encoder expects patch width " +
                     std::to_string(w1v.rows()) + ", got " + std::to_string(width));
  }
  const int d = w1v.cols();

  // Rows of the flattened grid are (patch, sensor) slices in t*N + i order;
  // the shared MLP applies to all rows at once.
  Var x = tape.leaf(Tensor({patch_count * sensors, width}, patches.data));
  Var w1 = tape.param(store, store.id("enc.w1"));
  Var b1 = tape.param(store, store.id("enc.b1"));
  Var w2 = tape.param(store, store.id("enc.w2"));
  Var b2 = tape.param(store, store.id("enc.b2"));
  Var hidden = relu(add(matmul(x, w1), b1));
  Var encoded = add(matmul(hidden, w2), b2);
  return add(encoded, tape.leaf(positional_grid(patch_count, sensors, d)));
}

}  // namespace fcstgnn
