#include "fcstgnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

namespace {

template <typename T>
void check_pair(const std::vector<T>& pred, const std::vector<T>& target, const char* name) {
  if (pred.empty() || pred.size() != target.size()) {
    throw ShapeError(std::string(name) + ": " + std::to_string(pred.size()) +
                     " predictions vs " + std::to_string(target.size()) + " targets");
  }
}

}  // namespace

double metric_rmse(const std::vector<double>& pred, const std::vector<double>& target) {
  check_pair(pred, target, "metric_rmse");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

double metric_nasa_score(const std::vector<double>& pred, const std::vector<double>& target) {
  check_pair(pred, target, "metric_nasa_score");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d < 0.0 ? std::exp(-d / 13.0) - 1.0 : std::exp(d / 10.0) - 1.0;
  }
  return acc;
}

double metric_accuracy(const std::vector<int>& pred, const std::vector<int>& target) {
  check_pair(pred, target, "metric_accuracy");
  int64_t hits = 0;
  for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == target[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double metric_macro_f1(const std::vector<int>& pred, const std::vector<int>& target,
                       std::vector<ClassStats>* table) {
  check_pair(pred, target, "metric_macro_f1");
  int max_cls = 0;
  for (int c : pred) max_cls = std::max(max_cls, c);
  for (int c : target) max_cls = std::max(max_cls, c);

  double f1_sum = 0.0;
  int included = 0;
  if (table) table->clear();
  for (int cls = 0; cls <= max_cls; ++cls) {
    ClassStats s;
    s.cls = cls;
    for (size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred[i] == cls;
      const bool t = target[i] == cls;
      s.tp += p && t;
      s.fp += p && !t;
      s.fn += !p && t;
    }
    if (s.tp + s.fp + s.fn == 0) continue;  // absent from both sides
    s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / (s.tp + s.fp) : 0.0;
    s.recall = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
    s.f1 = s.precision + s.recall > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    f1_sum += s.f1;
    ++included;
    if (table) table->push_back(s);
  }
  return included > 0 ? f1_sum / included : 0.0;
}

}  // namespace fcstgnn
