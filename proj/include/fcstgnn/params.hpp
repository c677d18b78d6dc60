#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

/// Named parameter blocks with a flat layout. Offsets follow registration
/// order; that flat order is the contract shared by Tape::backward, the
/// optimizer, snapshots, and the params file.
class ParamStore {
 public:
  int add(std::string name, Tensor init);

  int id(std::string_view name) const;  // throws ConfigError when missing
  bool has(std::string_view name) const;

  int count() const { return static_cast<int>(blocks_.size()); }
  int64_t total_size() const { return total_; }
  int64_t offset(int block) const { return blocks_[static_cast<size_t>(block)].offset; }
  const std::string& name(int block) const { return blocks_[static_cast<size_t>(block)].name; }

  Tensor& value(int block) { return blocks_[static_cast<size_t>(block)].value; }
  const Tensor& value(int block) const { return blocks_[static_cast<size_t>(block)].value; }
  const Tensor& value(std::string_view name) const { return value(id(name)); }

  /// Copy all blocks into one flat vector (registration order).
  std::vector<double> flatten() const;
  /// Overwrite all blocks from a flat vector of total_size() values.
  void load_flat(std::span<const double> flat);

  /// Per-block view of a flat gradient (or parameter) vector.
  std::span<double> block_span(std::span<double> flat, int block) const;
  std::span<const double> block_span(std::span<const double> flat, int block) const;

 private:
  struct Block {
    std::string name;
    Tensor value;
    int64_t offset = 0;
  };
  std::vector<Block> blocks_;
  int64_t total_ = 0;
};

}  // namespace fcstgnn
