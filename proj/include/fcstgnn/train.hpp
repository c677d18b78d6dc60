#pragma once

#include <string>
#include <vector>

#include "fcstgnn/data.hpp"
#include "fcstgnn/metrics.hpp"
#include "fcstgnn/model.hpp"

namespace fcstgnn {

struct TrainConfig {
  int batch_size = 100;
  int epochs = 40;
  double lr = 1e-3;  // lr = 0 is legal: the loop runs but parameters stay put
  uint64_t seed = 1;
  int patience = 0;  // 0 disables early stopping

  void validate() const;  // ConfigError naming the bad field
  bool operator==(const TrainConfig&) const = default;
};

struct EvalReport {
  TaskKind task = TaskKind::kClassification;
  int count = 0;
  // regression
  double rmse = 0.0;
  double nasa_score = 0.0;
  // classification
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassStats> per_class;
};

struct EpochRow {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_metric = 0.0;  // rmse (regression) or accuracy (classification)
};

struct TrainResult {
  std::vector<EpochRow> log;
  int best_epoch = 0;
  double best_val = 0.0;
  EvalReport test;
};

// Per-sample predictions, order-preserving regardless of thread count.
std::vector<double> predict_regression(const Model& model,
                                       const std::vector<Sample>& samples);
std::vector<int> predict_classes(const Model& model, const std::vector<Sample>& samples);

EvalReport evaluate(const Model& model, const std::vector<Sample>& samples);

// Adam on shuffled minibatches. Tracks the best validation epoch and leaves
// the model holding that epoch's parameters; test in the result is evaluated
// with them. Identical inputs give identical results on any thread count.
TrainResult train_model(Model& model, const Dataset& data, const TrainConfig& cfg);

// Shortest decimal form that parses back to the same double. Every number in
// the CSV and pretty reports goes through this one formatter.
std::string format_metric(double v);

std::string report_csv(const EvalReport& report);
std::string report_pretty(const EvalReport& report);
// Header "epoch,train_loss,val_rmse|val_accuracy"; no timestamps anywhere.
std::string log_csv(const std::vector<EpochRow>& log, TaskKind task);

}  // namespace fcstgnn
