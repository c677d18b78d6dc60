#pragma once

// Loop-only reference implementations the tests compare the library's tensor
// and graph paths against. Deliberately naive: every value is produced by
// scalar arithmetic in index order, no shared code with src/.

#include <cmath>
#include <vector>

#include "fcstgnn/params.hpp"
#include "fcstgnn/tensor.hpp"

namespace oracle {

using fcstgnn::ParamStore;
using fcstgnn::Tensor;

// rows x cols matrix product, plain triple loop.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor c = Tensor::zeros({a.rows(), b.cols()});
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += a.at2(i, k) * b.at2(k, j);
      c.at2(i, j) = acc;
    }
  }
  return c;
}

inline Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

inline Tensor add_bias(const Tensor& x, const Tensor& b) {
  Tensor y = x;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) y.at2(i, j) += b.data[static_cast<size_t>(j)];
  }
  return y;
}

inline Tensor softmax_rows(const Tensor& x) {
  Tensor y = x;
  for (int i = 0; i < x.rows(); ++i) {
    double mx = x.at2(i, 0);
    for (int j = 1; j < x.cols(); ++j) mx = std::max(mx, x.at2(i, j));
    double total = 0.0;
    for (int j = 0; j < x.cols(); ++j) total += std::exp(x.at2(i, j) - mx);
    for (int j = 0; j < x.cols(); ++j) y.at2(i, j) = std::exp(x.at2(i, j) - mx) / total;
  }
  return y;
}

// One graph-conv step over a window: H = E Z, U = relu(H Wg + bg), then the
// per-sensor mean over the window's patch positions. Rows are (patch, sensor)
// pairs, patch-major.
inline Tensor propagate_update_pool(const Tensor& adjacency, const Tensor& z,
                                    const Tensor& wg, const Tensor& bg,
                                    int window_patches, int sensors) {
  const int nodes = window_patches * sensors;
  const int dim = z.cols();
  Tensor h = Tensor::zeros({nodes, dim});
  for (int r = 0; r < nodes; ++r) {
    for (int c = 0; c < dim; ++c) {
      double acc = 0.0;
      for (int k = 0; k < nodes; ++k) acc += adjacency.at2(r, k) * z.at2(k, c);
      h.at2(r, c) = acc;
    }
  }
  Tensor u = Tensor::zeros({nodes, dim});
  for (int r = 0; r < nodes; ++r) {
    for (int c = 0; c < dim; ++c) {
      double acc = bg.data[static_cast<size_t>(c)];
      for (int k = 0; k < dim; ++k) acc += h.at2(r, k) * wg.at2(k, c);
      u.at2(r, c) = acc > 0.0 ? acc : 0.0;
    }
  }
  Tensor pooled = Tensor::zeros({sensors, dim});
  for (int i = 0; i < sensors; ++i) {
    for (int c = 0; c < dim; ++c) {
      double acc = 0.0;
      for (int m = 0; m < window_patches; ++m) acc += u.at2(m * sensors + i, c);
      pooled.at2(i, c) = acc / window_patches;
    }
  }
  return pooled;
}

// The whole model forward, reimplemented as one dense graph over all patches
// (no windowing code): encoder, positional codes, per-branch full-graph
// adjacency with decay, one MPNN step, pool over all patches, concat, MLP,
// head scores. Valid against the library model exactly when M = L_hat, s = 1.
inline Tensor dense_model_scores(const ParamStore& params, const Tensor& values,
                                 int patch_size, int feature_dim, double delta,
                                 int branches, int head_dim, bool bounded,
                                 double max_rul) {
  const int sensors = values.rows();
  const int patch_count = values.cols() / patch_size;
  const int nodes = patch_count * sensors;
  const int d = feature_dim;

  // Shared encoder over each patch slice, plus the patch-index code.
  Tensor grid = Tensor::zeros({nodes, d});
  const Tensor& w1 = params.value("enc.w1");
  const Tensor& b1 = params.value("enc.b1");
  const Tensor& w2 = params.value("enc.w2");
  const Tensor& b2 = params.value("enc.b2");
  for (int t = 0; t < patch_count; ++t) {
    for (int i = 0; i < sensors; ++i) {
      std::vector<double> hidden(static_cast<size_t>(d), 0.0);
      for (int c = 0; c < d; ++c) {
        double acc = b1.data[static_cast<size_t>(c)];
        for (int k = 0; k < patch_size; ++k) {
          acc += values.at2(i, t * patch_size + k) * w1.at2(k, c);
        }
        hidden[static_cast<size_t>(c)] = acc > 0.0 ? acc : 0.0;
      }
      for (int c = 0; c < d; ++c) {
        double acc = b2.data[static_cast<size_t>(c)];
        for (int k = 0; k < d; ++k) acc += hidden[static_cast<size_t>(k)] * w2.at2(k, c);
        const int k = c / 2;
        const double omega = std::pow(10000.0, -2.0 * k / d);
        const double code = (c % 2 == 0) ? std::sin(omega * t) : std::cos(omega * t);
        grid.at2(t * sensors + i, c) = acc + code;
      }
    }
  }

  // Per-branch dense graph step over all nodes at once.
  std::vector<Tensor> branch_out;
  for (int b = 0; b < branches; ++b) {
    const std::string prefix = "branch" + std::to_string(b) + ".";
    const Tensor& ws = params.value(prefix + "ws");
    const Tensor& wg = params.value(prefix + "wg");
    const Tensor& bg = params.value(prefix + "bg");
    const Tensor projected = matmul(grid, ws);
    Tensor scores = Tensor::zeros({nodes, nodes});
    for (int r = 0; r < nodes; ++r) {
      for (int c = 0; c < nodes; ++c) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += projected.at2(r, k) * projected.at2(c, k);
        scores.at2(r, c) = acc;
      }
    }
    Tensor adj = softmax_rows(scores);
    for (int r = 0; r < nodes; ++r) {
      for (int c = 0; c < nodes; ++c) {
        const int pr = r / sensors, pc = c / sensors;
        adj.at2(r, c) *= std::pow(delta, std::abs(pr - pc));
      }
    }
    branch_out.push_back(propagate_update_pool(adj, grid, wg, bg, patch_count, sensors));
  }

  // Stack branches, flatten, two-layer MLP, head.
  Tensor flat = Tensor::zeros({1, branches * sensors * d});
  {
    int pos = 0;
    for (const Tensor& part : branch_out) {
      for (double v : part.data) flat.data[static_cast<size_t>(pos++)] = v;
    }
  }
  const Tensor h1 = relu(add_bias(matmul(flat, params.value("out.w1")),
                                  params.value("out.b1")));
  const Tensor h2 = add_bias(matmul(h1, params.value("out.w2")), params.value("out.b2"));
  Tensor y = add_bias(matmul(h2, params.value("head.w")), params.value("head.b"));
  if (head_dim == 1 && bounded) {
    for (double& v : y.data) v = max_rul / (1.0 + std::exp(-v));
  }
  return y;
}

}  // namespace oracle
