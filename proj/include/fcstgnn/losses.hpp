#pragma once

#include <vector>

#include "fcstgnn/tape.hpp"

namespace fcstgnn {

// Mean squared difference over a batch of scalar predictions; pred must have
// one element per target (shape {n} or {n,1}).
Var loss_mse(Var pred, const std::vector<double>& target);

// Mean negative log softmax probability of the true class; logits {n, K},
// one class index per row.
Var loss_cross_entropy(Var logits, const std::vector<int>& target);

}  // namespace fcstgnn
