#pragma once

#include <stdexcept>
#include <string>

namespace fcstgnn {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// stable exit codes: ConfigError/ShapeError -> 2, DataError -> 3,
// NumericFault -> 4 (gradcheck failures use 5).

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fcstgnn
