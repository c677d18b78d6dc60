#include "fcstgnn/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <span>
#include <sstream>

#include "fcstgnn/adam.hpp"
#include "fcstgnn/errors.hpp"
#include "fcstgnn/tape.hpp"

namespace fcstgnn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size: must be >= 1");
  if (epochs < 1) throw ConfigError("epochs: must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr: must be finite and >= 0");
  if (patience < 0) throw ConfigError("patience: must be >= 0");
}

std::vector<double> predict_regression(const Model& model,
                                       const std::vector<Sample>& samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<double> preds(static_cast<size_t>(n), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      Tape tape;
      preds[static_cast<size_t>(i)] =
          model.output(tape, samples[static_cast<size_t>(i)].values).scalar();
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return preds;
}

std::vector<int> predict_classes(const Model& model, const std::vector<Sample>& samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<int> preds(static_cast<size_t>(n), 0);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      Tape tape;
      const Tensor scores =
          model.output(tape, samples[static_cast<size_t>(i)].values).value();
      int best = 0;
      for (int k = 1; k < scores.cols(); ++k) {
        if (scores.at2(0, k) > scores.at2(0, best)) best = k;
      }
      preds[static_cast<size_t>(i)] = best;
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return preds;
}

EvalReport evaluate(const Model& model, const std::vector<Sample>& samples) {
  EvalReport report;
  report.task = model.dims().task;
  report.count = static_cast<int>(samples.size());
  if (samples.empty()) throw DataError("evaluate: split is empty");
  if (report.task == TaskKind::kRegression) {
    const std::vector<double> preds = predict_regression(model, samples);
    std::vector<double> targets(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) targets[i] = samples[i].target;
    report.rmse = metric_rmse(preds, targets);
    report.nasa_score = metric_nasa_score(preds, targets);
  } else {
    const std::vector<int> preds = predict_classes(model, samples);
    std::vector<int> targets(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) targets[i] = samples[i].label;
    report.accuracy = metric_accuracy(preds, targets);
    report.macro_f1 = metric_macro_f1(preds, targets, &report.per_class);
  }
  return report;
}

namespace {

// Gradient accumulation is chunked by a fixed sample count, never by thread
// count, so the reduction order (and thus every rounding) is identical on any
// machine.
constexpr int kGradChunk = 8;

// Sum of per-sample losses over the batch; gradients of the sum accumulate
// into grads (caller zeroes). Mean-scaling happens in the caller.
double batch_backward(const Model& model, const std::vector<Sample>& samples,
                      const std::vector<int>& batch, std::vector<double>* grads) {
  const int n = static_cast<int>(batch.size());
  const int chunks = (n + kGradChunk - 1) / kGradChunk;
  const size_t param_count = grads->size();
  std::vector<std::vector<double>> chunk_grads(
      static_cast<size_t>(chunks), std::vector<double>(param_count, 0.0));
  std::vector<double> chunk_loss(static_cast<size_t>(chunks), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < chunks; ++c) {
    try {
      std::span<double> sink(chunk_grads[static_cast<size_t>(c)]);
      const int end = std::min(n, (c + 1) * kGradChunk);
      for (int k = c * kGradChunk; k < end; ++k) {
        Tape tape;
        const Var loss =
            model.sample_loss(tape, samples[static_cast<size_t>(batch[static_cast<size_t>(k)])]);
        chunk_loss[static_cast<size_t>(c)] += loss.scalar();
        tape.backward(loss, sink);
      }
    } catch (...) {
      errors[static_cast<size_t>(c)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double total = 0.0;
  for (int c = 0; c < chunks; ++c) {
    total += chunk_loss[static_cast<size_t>(c)];
    const std::vector<double>& part = chunk_grads[static_cast<size_t>(c)];
    for (size_t i = 0; i < param_count; ++i) (*grads)[i] += part[i];
  }
  return total;
}

[[noreturn]] void rethrow_with_context(int epoch, int batch) {
  const std::string where =
      "epoch " + std::to_string(epoch) + " batch " + std::to_string(batch) + ": ";
  try {
    throw;
  } catch (const NumericFault& e) {
    throw NumericFault(where + e.what());
  }
}

}  // namespace

TrainResult train_model(Model& model, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.train.empty()) throw DataError("train_model: train split is empty");
  // Model selection falls back to the train split when there is no val data.
  const std::vector<Sample>& val =
      data.val.empty() ? data.train : data.val;
  const bool higher_better = model.dims().task == TaskKind::kClassification;

  ParamStore& store = model.params();
  const size_t param_count = static_cast<size_t>(store.total_size());
  AdamState adam(store.total_size(), cfg.lr);
  const Rng master(cfg.seed);

  TrainResult result;
  result.best_epoch = 0;
  result.best_val = higher_better ? -1.0 : std::numeric_limits<double>::infinity();
  std::vector<double> best_params = store.flatten();

  std::vector<double> grads(param_count, 0.0);
  std::vector<double> flat(param_count, 0.0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng = master.derive("train/shuffle", static_cast<uint64_t>(epoch));
    const std::vector<std::vector<int>> batches =
        make_batches(static_cast<int>(data.train.size()), cfg.batch_size, shuffle_rng);
    double epoch_loss = 0.0;
    for (size_t b = 0; b < batches.size(); ++b) {
      const std::vector<int>& batch = batches[b];
      std::fill(grads.begin(), grads.end(), 0.0);
      double batch_total = 0.0;
      try {
        batch_total = batch_backward(model, data.train, batch, &grads);
      } catch (const NumericFault&) {
        rethrow_with_context(epoch, static_cast<int>(b + 1));
      }
      epoch_loss += batch_total;
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (double& g : grads) g *= inv;
      flat = store.flatten();
      adam_step(flat, grads, adam);
      for (double v : flat) {
        if (!std::isfinite(v)) {
          throw NumericFault("epoch " + std::to_string(epoch) + " batch " +
                             std::to_string(b + 1) + ": parameters diverged");
        }
      }
      store.load_flat(flat);
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_loss = epoch_loss / static_cast<double>(data.train.size());
    const EvalReport val_report = evaluate(model, val);
    row.val_metric = higher_better ? val_report.accuracy : val_report.rmse;
    result.log.push_back(row);

    const bool improved = result.best_epoch == 0 ||
                          (higher_better ? row.val_metric > result.best_val
                                         : row.val_metric < result.best_val);
    if (improved) {
      result.best_epoch = epoch;
      result.best_val = row.val_metric;
      best_params = store.flatten();
    } else if (cfg.patience > 0 && epoch - result.best_epoch >= cfg.patience) {
      break;
    }
  }

  store.load_flat(best_params);
  result.test = data.test.empty() ? EvalReport{} : evaluate(model, data.test);
  if (data.test.empty()) {
    result.test.task = model.dims().task;
    result.test.count = 0;
  }
  return result;
}

std::string format_metric(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "count," << report.count << "\n";
  if (report.task == TaskKind::kRegression) {
    out << "rmse," << format_metric(report.rmse) << "\n";
    out << "nasa_score," << format_metric(report.nasa_score) << "\n";
  } else {
    out << "accuracy," << format_metric(report.accuracy) << "\n";
    out << "macro_f1," << format_metric(report.macro_f1) << "\n";
    for (const ClassStats& c : report.per_class) {
      out << "precision_class_" << c.cls << "," << format_metric(c.precision) << "\n";
      out << "recall_class_" << c.cls << "," << format_metric(c.recall) << "\n";
      out << "f1_class_" << c.cls << "," << format_metric(c.f1) << "\n";
    }
  }
  return std::move(out).str();
}

std::string report_pretty(const EvalReport& report) {
  std::ostringstream out;
  out << "evaluation (" << task_name(report.task) << ", " << report.count
      << " samples)\n";
  if (report.task == TaskKind::kRegression) {
    out << "  rmse        " << format_metric(report.rmse) << "\n";
    out << "  nasa_score  " << format_metric(report.nasa_score) << "\n";
  } else {
    out << "  accuracy    " << format_metric(report.accuracy) << "\n";
    out << "  macro_f1    " << format_metric(report.macro_f1) << "\n";
    for (const ClassStats& c : report.per_class) {
      out << "  class " << c.cls << ": precision=" << format_metric(c.precision)
          << " recall=" << format_metric(c.recall) << " f1=" << format_metric(c.f1)
          << "\n";
    }
  }
  return std::move(out).str();
}

std::string log_csv(const std::vector<EpochRow>& log, TaskKind task) {
  std::ostringstream out;
  out << "epoch,train_loss,"
      << (task == TaskKind::kRegression ? "val_rmse" : "val_accuracy") << "\n";
  for (const EpochRow& row : log) {
    out << row.epoch << "," << format_metric(row.train_loss) << ","
        << format_metric(row.val_metric) << "\n";
  }
  return std::move(out).str();
}

}  // namespace fcstgnn
