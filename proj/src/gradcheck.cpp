#include "fcstgnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "fcstgnn/model.hpp"
#include "fcstgnn/rng.hpp"
#include "fcstgnn/sample.hpp"
#include "fcstgnn/tape.hpp"

namespace fcstgnn {

double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

namespace {

constexpr double kStep = 1e-5;
constexpr double kFloor = 1e-4;

struct Variant {
  const char* name;
  TaskKind task;
  int classes;
  double max_rul;
};

double loss_value(const Model& model, const Sample& sample) {
  Tape tape;
  return model.sample_loss(tape, sample).scalar();
}

}  // namespace

GradcheckReport run_gradcheck(uint64_t seed) {
  GradcheckReport report;
  report.tolerance = kFloor;
  report.pass = true;

  const Variant variants[] = {
      {"regression", TaskKind::kRegression, 0, 0.0},
      {"regression-bounded", TaskKind::kRegression, 0, 1.0},
      {"classification", TaskKind::kClassification, 3, 0.0},
  };

  // Small but structurally complete: two branches, three windows, every op
  // in the pipeline exercised.
  ModelConfig cfg;
  cfg.patch_size = 3;
  cfg.feature_dim = 4;
  cfg.window_size = 2;
  cfg.stride = 1;
  cfg.decay_rate = 0.9;
  cfg.branches = 2;
  cfg.repr_dim = 16;

  for (const Variant& variant : variants) {
    cfg.head = variant.task;
    DataDims dims;
    dims.sensors = 3;
    dims.timesteps = 12;
    dims.task = variant.task;
    dims.classes = variant.classes;
    dims.max_rul = variant.max_rul;
    Model model(cfg, dims, seed);

    Sample sample;
    sample.values = Tensor({dims.sensors, dims.timesteps});
    Rng rng = Rng(seed).derive("gradcheck/sample");
    for (double& v : sample.values.data) v = rng.normal();
    if (variant.task == TaskKind::kRegression) {
      sample.target = 0.7;
    } else {
      sample.label = 1;
    }

    ParamStore& store = model.params();
    std::vector<double> analytic(static_cast<size_t>(store.total_size()), 0.0);
    {
      Tape tape;
      const Var loss = model.sample_loss(tape, sample);
      tape.backward(loss, analytic);
    }

    std::vector<double> flat = store.flatten();
    for (int b = 0; b < store.count(); ++b) {
      GradcheckBlock row;
      row.variant = variant.name;
      row.block = store.name(b);
      const int64_t off = store.offset(b);
      const int64_t len = store.value(b).size();
      for (int64_t p = off; p < off + len; ++p) {
        const double base = flat[static_cast<size_t>(p)];
        flat[static_cast<size_t>(p)] = base + kStep;
        store.load_flat(flat);
        const double up = loss_value(model, sample);
        flat[static_cast<size_t>(p)] = base - kStep;
        store.load_flat(flat);
        const double down = loss_value(model, sample);
        flat[static_cast<size_t>(p)] = base;
        const double numeric = (up - down) / (2.0 * kStep);
        row.max_rel_err = std::max(
            row.max_rel_err, rel_err(analytic[static_cast<size_t>(p)], numeric, kFloor));
      }
      store.load_flat(flat);
      row.pass = row.max_rel_err <= report.tolerance;
      report.pass = report.pass && row.pass;
      report.blocks.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace fcstgnn
