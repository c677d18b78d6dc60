#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fcstgnn {

struct GradcheckBlock {
  std::string variant;
  std::string block;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct GradcheckReport {
  std::vector<GradcheckBlock> blocks;
  double tolerance = 1e-4;
  bool pass = false;
};

// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero gradients from
// amplifying finite-difference noise.
double rel_err(double a, double b, double floor);

// Central finite differences over every parameter of a small end-to-end model,
// once per head variant: unbounded regression, sigmoid-bounded regression, and
// 3-class classification. Deterministic in the seed.
GradcheckReport run_gradcheck(uint64_t seed);

}  // namespace fcstgnn
