#pragma once

#include <vector>

namespace fcstgnn {

// Per-class confusion counts with derived precision/recall/F1.
struct ClassStats {
  int cls = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double metric_rmse(const std::vector<double>& pred, const std::vector<double>& target);

// Asymmetric exponential error sum used for remaining-useful-life scoring:
// d = pred - target contributes exp(-d/13) - 1 when d < 0 (early) and
// exp(d/10) - 1 otherwise (late). Summed, not averaged.
double metric_nasa_score(const std::vector<double>& pred, const std::vector<double>& target);

double metric_accuracy(const std::vector<int>& pred, const std::vector<int>& target);

// Unweighted mean of per-class F1. Classes absent from both pred and target
// are excluded; classes in target but never predicted contribute F1 = 0.
// When table is given it receives one row per included class.
double metric_macro_f1(const std::vector<int>& pred, const std::vector<int>& target,
                       std::vector<ClassStats>* table = nullptr);

}  // namespace fcstgnn
