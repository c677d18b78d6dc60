#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fcstgnn/rng.hpp"
#include "fcstgnn/sample.hpp"

namespace fcstgnn {

struct DatasetManifest {
  std::string name;
  TaskKind task = TaskKind::kClassification;
  int sensors = 0;
  int timesteps = 0;
  int classes = 0;       // classification only
  double max_rul = 0.0;  // regression only
  int train_count = 0;
  int val_count = 0;
  int test_count = 0;
  // Per-sensor moments computed on the train split; stored values are already
  // standardized with them.
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<int> constant_sensors;  // sensors whose std fell back to 1
  std::string generator;              // generator parameter echo, "" when ingested
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;

  const std::vector<Sample>& split(std::string_view name) const;  // DataError on unknown
};

// Container directory: manifest.json plus one binary blob per split
// (train.bin, val.bin, test.bin). Blob layout: magic "FCSTG1", then
// little-endian u32 version, count, sensors, timesteps, label kind
// (0 = float32 target, 1 = int32 class), then per sample sensors*timesteps
// float32 values row-major by sensor followed by the 4-byte label.
void save_dataset(const std::string& dir, const Dataset& data);
Dataset load_dataset(const std::string& dir);

// Computes per-sensor mean/std on the train split, standardizes every split
// in place, and records the moments in the manifest. Constant sensors keep
// std 1 and are flagged.
void standardize(Dataset& data);

// CSV ingestion. Per-file schema: every *.csv in the directory except
// labels.csv is one sample (id = file stem), one row per timestep, one column
// per sensor. Long schema: data.csv rows are sample_id,v_0,...,v_{N-1} with
// each sample's timesteps contiguous. labels.csv rows are id,label.
struct IngestOptions {
  std::string source_dir;
  TaskKind task = TaskKind::kClassification;
  bool long_format = false;
  double max_rul = 0.0;  // regression clip; 0 disables
  uint64_t seed = 1;     // split assignment shuffle
  std::string name = "ingested";
};
Dataset ingest_csv(const IngestOptions& opts);

struct DedtOptions {
  uint64_t seed = 1;
  int sensors = 4;
  int timesteps = 48;
  int per_class = 500;
  int lag = 6;          // tau: chosen to cross a patch boundary at f = lag
  double alpha = 0.9;   // coupling strength
  double sigma = 0.3;   // coupling noise
  double texture = 0.1; // fine noise on top of the per-block levels
};
// Binary classification separable only through lagged cross-sensor structure.
// Every sensor holds a fresh level each lag-length block plus fine noise. A
// hidden pair (i, j) is coupled as j[t+lag] = alpha*i[t] + noise in class 1;
// class 0 applies the identical coupling to a copy of the source cyclically
// shifted by whole blocks, so marginals, same-timestamp correlations, and all
// within-patch structure match across classes while the alignment a windowed
// spatial-temporal graph can exploit is destroyed.
Dataset synth_dedt(const DedtOptions& opts);

struct RulOptions {
  uint64_t seed = 1;
  int sensors = 4;
  int timesteps = 48;
  int trajectories = 60;
  int samples_per_trajectory = 10;
  int age_stride = 3;
  double noise = 0.1;
  double max_rul = 60.0;
};
// Regression: each trajectory degrades linearly to a failure time; sensors
// are noisy affine projections of the degradation level. A sample is an
// L-wide window at increasing ages; label = steps from window end to failure,
// clipped at max_rul. Splits separate whole trajectories.
Dataset synth_rul(const RulOptions& opts);

// Index batches. Training batches reshuffle with the caller's rng; eval
// batches keep storage order. The final partial batch is included.
std::vector<std::vector<int>> make_batches(int count, int batch_size, Rng& rng);
std::vector<std::vector<int>> make_eval_batches(int count, int batch_size);

}  // namespace fcstgnn
