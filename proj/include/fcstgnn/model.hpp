#pragma once

#include <cstdint>
#include <string>

#include "fcstgnn/graph_conv.hpp"
#include "fcstgnn/params.hpp"
#include "fcstgnn/sample.hpp"
#include "fcstgnn/tape.hpp"
#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

enum class Ablation { kNone, kNoFcGc2, kNoMp, kNoPooling, kNoDecay };

const char* ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& name);  // ConfigError on unknown

// Architecture knobs. Defaults follow the reference setup: patches of 6
// timesteps, windows of 2 patches at stride 1, decay 0.9, 2 branches.
struct ModelConfig {
  int patch_size = 6;       // f: timesteps per patch
  int feature_dim = 16;     // d: per-sensor feature width
  int window_size = 2;      // M: patches per window
  int stride = 1;           // s: window step
  double decay_rate = 0.9;  // delta in (0, 1]
  int branches = 2;         // B: parallel graph branches
  int repr_dim = 128;       // D: representation width
  TaskKind head = TaskKind::kClassification;
  Ablation ablation = Ablation::kNone;

  void validate() const;  // ConfigError naming the bad field
  bool operator==(const ModelConfig&) const = default;
};

// Shape facts a model needs from its dataset.
struct DataDims {
  int sensors = 0;
  int timesteps = 0;
  TaskKind task = TaskKind::kClassification;
  int classes = 0;      // classification only
  double max_rul = 0.0; // regression; > 0 bounds the head through a scaled sigmoid

  bool operator==(const DataDims&) const = default;
};

// Config and dims resolved into the concrete pipeline. The ablations are pure
// config rewrites: no_fc_gc2 pins M=1/s=1 and means the per-window features
// over windows; no_mp uses one whole-series window without pooling;
// no_pooling keeps the windows but flattens instead of pooling; no_decay
// pins delta=1.
struct EffectivePlan {
  int patch_count = 0;   // L_hat
  int window_size = 1;   // M after ablation rewrite
  int stride = 1;
  double decay_rate = 1.0;
  WindowPlan windows;
  bool pool_windows = true;       // false: pass window rows through unpooled
  bool mean_over_windows = false; // true: average window outputs (no_fc_gc2)
  int stacked_rows = 0;           // rows of the concatenated branch output
  int head_dim = 1;               // 1 or K

  int stacked_width(int feature_dim) const { return stacked_rows * feature_dim; }
};

EffectivePlan resolve_plan(const ModelConfig& cfg, const DataDims& dims);

// The full representation pipeline with trainable parameters: shared patch
// encoder, B independent graph branches over sliding windows, output MLP,
// and a task head.
class Model {
 public:
  Model(ModelConfig cfg, DataDims dims, uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  const DataDims& dims() const { return dims_; }
  const EffectivePlan& plan() const { return plan_; }
  uint64_t seed() const { return seed_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Representation h, shape {1, D}.
  Var representation(Tape& tape, const Tensor& values) const;
  // Head output: {1,1} prediction (regression) or {1,K} class scores.
  Var output(Tape& tape, const Tensor& values) const;
  // Scalar loss for one labeled sample: squared error or cross-entropy.
  Var sample_loss(Tape& tape, const Sample& sample) const;

  // Post-decay adjacency of one (branch, window) pair, for diagnostics.
  // pre_decay skips the mask.
  Var window_adjacency(Tape& tape, const Tensor& values, int branch, int window,
                       bool pre_decay = false) const;

 private:
  Var branch_features(Tape& tape, Var grid, int branch) const;
  void check_input(const Tensor& values) const;

  ModelConfig cfg_;
  DataDims dims_;
  EffectivePlan plan_;
  uint64_t seed_ = 0;
  ParamStore params_;
  Tensor decay_;  // cached mask, identical for every window and branch
};

}  // namespace fcstgnn
