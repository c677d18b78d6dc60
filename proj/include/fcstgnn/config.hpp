#pragma once

#include <string>

#include "fcstgnn/model.hpp"
#include "fcstgnn/train.hpp"

namespace fcstgnn {

/// One config file drives a whole run: [model] picks the architecture,
/// [train] the optimization. Keys are unique across sections, so the section
/// headers are documentation more than namespace.
struct FileConfig {
  ModelConfig model;
  TrainConfig train;

  bool operator==(const FileConfig&) const = default;
};

// key = value lines, '#' comments, [model]/[train] section headers. Unknown
// or duplicate keys, malformed values, and out-of-range fields are
// ConfigError naming the key.
FileConfig parse_config(const std::string& text);

// DataError when unreadable, then parse_config.
FileConfig load_config_file(const std::string& path);

// Canonical form: fixed key order, shortest round-trip numbers. Feeding the
// output back through parse_config reproduces the struct exactly.
std::string serialize_config(const FileConfig& cfg);

}  // namespace fcstgnn
