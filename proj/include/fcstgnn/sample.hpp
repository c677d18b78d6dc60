#pragma once

#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

enum class TaskKind { kRegression, kClassification };

inline const char* task_name(TaskKind t) {
  return t == TaskKind::kRegression ? "regression" : "classification";
}

// One multivariate time-series sample; values is sensors x timesteps.
// target is read for regression tasks, label for classification.
struct Sample {
  Tensor values;
  double target = 0.0;
  int label = 0;
};

}  // namespace fcstgnn
