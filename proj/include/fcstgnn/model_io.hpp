#pragma once

#include <string>

#include "fcstgnn/config.hpp"
#include "fcstgnn/model.hpp"

namespace fcstgnn {

/// Params file: everything needed to rebuild the trained model and rerun an
/// identical evaluation. Little-endian throughout, no timestamps, so the same
/// run always produces the same bytes.
///
/// Layout: magic "FCSTGP01", u32 version (1), u64 seed, the canonical config
/// text (u32 length + bytes), the dataset dims (u32 sensors, u32 timesteps,
/// u8 task, u32 classes, f64 max_rul), then u32 block count and per block:
/// u32 name length + name, u32 rank, u32 extents, f64 values.
struct LoadedModel {
  FileConfig config;
  DataDims dims;
  uint64_t seed = 0;
  Model model;
};

void save_params(const std::string& path, const Model& model, const TrainConfig& train);

// DataError on bad magic, version, or any block mismatch.
LoadedModel load_params(const std::string& path);

}  // namespace fcstgnn
