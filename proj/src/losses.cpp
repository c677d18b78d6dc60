#include "fcstgnn/losses.hpp"

#include <string>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

Var loss_mse(Var pred, const std::vector<double>& target) {
  if (target.empty()) throw ShapeError("loss_mse: empty batch");
  const int n = static_cast<int>(target.size());
  if (pred.value().size() != n) {
    throw ShapeError("loss_mse: " + std::to_string(pred.value().size()) +
                     " predictions vs " + std::to_string(n) + " targets");
  }
  Tape& tape = *pred.tape;
  std::vector<double> negated(target.size());
  for (size_t i = 0; i < target.size(); ++i) negated[i] = -target[i];
  Var diff = add(reshape(pred, {n}), tape.leaf(Tensor({n}, std::move(negated))));
  return scalar_mul(sum_all(mul(diff, diff)), 1.0 / n);
}

Var loss_cross_entropy(Var logits, const std::vector<int>& target) {
  if (target.empty()) throw ShapeError("loss_cross_entropy: empty batch");
  const Tensor& lv = logits.value();
  const int n = static_cast<int>(target.size());
  if (lv.rank() != 2 || lv.rows() != n) {
    throw ShapeError("loss_cross_entropy: logits " + shape_str(lv.shape) + " vs " +
                     std::to_string(n) + " targets");
  }
  const int classes = lv.cols();
  Tensor onehot({n, classes});
  for (int i = 0; i < n; ++i) {
    const int label = target[static_cast<size_t>(i)];
    if (label < 0 || label >= classes) {
      throw ShapeError("loss_cross_entropy: class index " + std::to_string(label) +
                       " outside [0, " + std::to_string(classes) + ")");
    }
    onehot.at2(i, label) = 1.0;
  }
  Tape& tape = *logits.tape;
  Var log_probs = log(softmax_last(logits));
  Var picked = sum_all(mul(log_probs, tape.leaf(std::move(onehot))));
  return scalar_mul(picked, -1.0 / n);
}

}  // namespace fcstgnn
