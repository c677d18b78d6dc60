#include "fcstgnn/model.hpp"

#include <cmath>
#include <utility>

#include "fcstgnn/errors.hpp"
#include "fcstgnn/fc_graph.hpp"
#include "fcstgnn/init.hpp"
#include "fcstgnn/losses.hpp"
#include "fcstgnn/patch_encoder.hpp"

namespace fcstgnn {

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kNoFcGc2: return "no_fc_gc2";
    case Ablation::kNoMp: return "no_mp";
    case Ablation::kNoPooling: return "no_pooling";
    case Ablation::kNoDecay: return "no_decay";
  }
  return "?";
}

Ablation ablation_from_name(const std::string& name) {
  for (Ablation a : {Ablation::kNone, Ablation::kNoFcGc2, Ablation::kNoMp,
                     Ablation::kNoPooling, Ablation::kNoDecay}) {
    if (name == ablation_name(a)) return a;
  }
  throw ConfigError("ablation: unknown variant '" + name + "'");
}

void ModelConfig::validate() const {
  if (patch_size < 1) throw ConfigError("f: patch size must be >= 1");
  if (feature_dim < 1) throw ConfigError("d: feature dim must be >= 1");
  if (window_size < 1) throw ConfigError("M: window size must be >= 1");
  if (stride < 1) throw ConfigError("s: stride must be >= 1");
  if (!(decay_rate > 0.0 && decay_rate <= 1.0)) {
    throw ConfigError("delta: decay rate must lie in (0, 1]");
  }
  if (branches < 1) throw ConfigError("branches: must be >= 1");
  if (repr_dim < 1) throw ConfigError("D: representation dim must be >= 1");
}

EffectivePlan resolve_plan(const ModelConfig& cfg, const DataDims& dims) {
  cfg.validate();
  if (dims.sensors < 1) throw ConfigError("dataset: sensor count must be >= 1");
  if (dims.timesteps < 1) throw ConfigError("dataset: timestep count must be >= 1");
  if (cfg.head != dims.task) {
    throw ConfigError(std::string("head: config wants ") + task_name(cfg.head) +
                      " but the dataset is " + task_name(dims.task));
  }
  if (dims.task == TaskKind::kClassification && dims.classes < 2) {
    throw ConfigError("dataset: classification needs >= 2 classes");
  }
  if (cfg.patch_size > dims.timesteps) {
    throw ConfigError("f: patch size " + std::to_string(cfg.patch_size) +
                      " exceeds series length " + std::to_string(dims.timesteps));
  }

  EffectivePlan plan;
  plan.patch_count = dims.timesteps / cfg.patch_size;
  plan.window_size = cfg.window_size;
  plan.stride = cfg.stride;
  plan.decay_rate = cfg.decay_rate;
  switch (cfg.ablation) {
    case Ablation::kNone:
      break;
    case Ablation::kNoFcGc2:
      plan.window_size = 1;
      plan.stride = 1;
      plan.mean_over_windows = true;
      break;
    case Ablation::kNoMp:
      plan.window_size = plan.patch_count;
      plan.stride = 1;
      plan.pool_windows = false;
      break;
    case Ablation::kNoPooling:
      plan.pool_windows = false;
      break;
    case Ablation::kNoDecay:
      plan.decay_rate = 1.0;
      break;
  }
  if (plan.window_size > plan.patch_count) {
    throw ConfigError("M: window size " + std::to_string(plan.window_size) +
                      " exceeds patch count " + std::to_string(plan.patch_count));
  }
  plan.windows = plan_windows(plan.patch_count, plan.window_size, plan.stride);

  const int per_window = plan.pool_windows ? dims.sensors
                                           : plan.window_size * dims.sensors;
  if (plan.mean_over_windows) {
    plan.stacked_rows = cfg.branches * dims.sensors;
  } else {
    plan.stacked_rows = cfg.branches * plan.windows.count() * per_window;
  }
  plan.head_dim = dims.task == TaskKind::kClassification ? dims.classes : 1;
  return plan;
}

namespace {

// Reraise stage errors with the pipeline stage attached, keeping the type so
// exit-code mapping still works.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (ShapeError& e) {
    throw ShapeError(std::string(name) + ": " + e.what());
  } catch (ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  } catch (NumericFault& e) {
    throw NumericFault(std::string(name) + ": " + e.what());
  }
}

}  // namespace

Model::Model(ModelConfig cfg, DataDims dims, uint64_t seed)
    : cfg_(cfg), dims_(dims), plan_(resolve_plan(cfg, dims)), seed_(seed) {
  const Rng master(seed);
  add_encoder_params(params_, cfg_.patch_size, cfg_.feature_dim, master);
  for (int b = 0; b < cfg_.branches; ++b) {
    add_branch_params(params_, b, cfg_.feature_dim, master);
  }

  const int stacked = plan_.stacked_width(cfg_.feature_dim);
  const double b_stacked = 1.0 / std::sqrt(static_cast<double>(stacked));
  const double b_repr = 1.0 / std::sqrt(static_cast<double>(cfg_.repr_dim));
  struct BlockSpec {
    const char* name;
    Shape shape;
    double bound;
  };
  const BlockSpec blocks[] = {
      {"out.w1", {stacked, cfg_.repr_dim}, b_stacked},
      {"out.b1", {cfg_.repr_dim}, b_stacked},
      {"out.w2", {cfg_.repr_dim, cfg_.repr_dim}, b_repr},
      {"out.b2", {cfg_.repr_dim}, b_repr},
      {"head.w", {cfg_.repr_dim, plan_.head_dim}, b_repr},
      {"head.b", {plan_.head_dim}, b_repr},
  };
  for (const BlockSpec& b : blocks) {
    Rng rng = master.derive(std::string("init/") + b.name);
    params_.add(b.name, uniform_init(rng, b.shape, b.bound));
  }

  decay_ = decay_matrix(plan_.window_size, dims_.sensors, plan_.decay_rate);
}

void Model::check_input(const Tensor& values) const {
  if (values.rank() != 2 || values.rows() != dims_.sensors ||
      values.cols() != dims_.timesteps) {
    throw ShapeError("sample shape " + shape_str(values.shape) + " does not match dataset " +
                     shape_str({dims_.sensors, dims_.timesteps}));
  }
}

Var Model::branch_features(Tape& tape, Var grid, int branch) const {
  const int sensors = dims_.sensors;
  const int d = cfg_.feature_dim;
  const int window_size = plan_.window_size;
  const std::string prefix = "branch" + std::to_string(branch) + ".";
  Var ws = tape.param(params_, params_.id(prefix + "ws"));
  Var wg = tape.param(params_, params_.id(prefix + "wg"));
  Var bg = tape.param(params_, params_.id(prefix + "bg"));

  std::vector<Var> pieces;
  pieces.reserve(plan_.windows.starts.size());
  for (int start : plan_.windows.starts) {
    Var z_window = slice_rows(grid, start * sensors, (start + window_size) * sensors);
    Var adjacency = stage("adjacency", [&] {
      return build_window_adjacency(z_window, ws, decay_);
    });
    Var propagated = stage("propagate", [&] { return mpnn_propagate(adjacency, z_window); });
    Var updated = stage("update", [&] { return mpnn_update(propagated, wg, bg); });
    if (plan_.pool_windows) {
      pieces.push_back(stage("pool", [&] {
        return temporal_pool(updated, window_size, sensors);
      }));
    } else {
      pieces.push_back(updated);
    }
  }
  Var out = pieces.size() == 1 ? pieces[0] : concat_axis(pieces, 0);
  if (plan_.mean_over_windows) {
    const int windows = plan_.windows.count();
    out = reshape(mean_axis(reshape(out, {windows, sensors * d}), 0), {sensors, d});
  }
  return out;
}

Var Model::representation(Tape& tape, const Tensor& values) const {
  check_input(values);
  Tensor patches = stage("segment", [&] { return segment_patches(values, cfg_.patch_size); });
  Var grid = stage("encode", [&] { return encode_and_position(tape, params_, patches); });

  std::vector<Var> branch_outputs;
  branch_outputs.reserve(static_cast<size_t>(cfg_.branches));
  for (int b = 0; b < cfg_.branches; ++b) {
    branch_outputs.push_back(branch_features(tape, grid, b));
  }
  Var stacked = branch_outputs.size() == 1 ? branch_outputs[0]
                                           : concat_axis(branch_outputs, 0);

  return stage("output", [&] {
    Var flat = reshape(stacked, {1, plan_.stacked_width(cfg_.feature_dim)});
    Var w1 = tape.param(params_, params_.id("out.w1"));
    Var b1 = tape.param(params_, params_.id("out.b1"));
    Var w2 = tape.param(params_, params_.id("out.w2"));
    Var b2 = tape.param(params_, params_.id("out.b2"));
    return add(matmul(relu(add(matmul(flat, w1), b1)), w2), b2);
  });
}

Var Model::output(Tape& tape, const Tensor& values) const {
  Var h = representation(tape, values);
  return stage("head", [&] {
    Var w = tape.param(params_, params_.id("head.w"));
    Var b = tape.param(params_, params_.id("head.b"));
    Var y = add(matmul(h, w), b);
    if (dims_.task == TaskKind::kRegression && dims_.max_rul > 0.0) {
      y = scalar_mul(sigmoid(y), dims_.max_rul);
    }
    return y;
  });
}

Var Model::sample_loss(Tape& tape, const Sample& sample) const {
  Var y = output(tape, sample.values);
  return stage("loss", [&] {
    if (dims_.task == TaskKind::kRegression) {
      return loss_mse(reshape(y, {1}), {sample.target});
    }
    return loss_cross_entropy(y, {sample.label});
  });
}

Var Model::window_adjacency(Tape& tape, const Tensor& values, int branch, int window,
                            bool pre_decay) const {
  check_input(values);
  if (branch < 0 || branch >= cfg_.branches) {
    throw ConfigError("branch index " + std::to_string(branch) + " outside [0, " +
                      std::to_string(cfg_.branches) + ")");
  }
  if (window < 0 || window >= plan_.windows.count()) {
    throw ConfigError("window index " + std::to_string(window) + " outside [0, " +
                      std::to_string(plan_.windows.count()) + ")");
  }
  Tensor patches = stage("segment", [&] { return segment_patches(values, cfg_.patch_size); });
  Var grid = stage("encode", [&] { return encode_and_position(tape, params_, patches); });
  const int sensors = dims_.sensors;
  const int start = plan_.windows.starts[static_cast<size_t>(window)];
  Var z_window = slice_rows(grid, start * sensors, (start + plan_.window_size) * sensors);
  Var ws = tape.param(params_, params_.id("branch" + std::to_string(branch) + ".ws"));
  return stage("adjacency", [&] {
    if (pre_decay) return softmax_last(window_scores(z_window, ws));
    return build_window_adjacency(z_window, ws, decay_);
  });
}

}  // namespace fcstgnn
