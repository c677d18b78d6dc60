#include "fcstgnn/params.hpp"

#include <algorithm>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

int ParamStore::add(std::string name, Tensor init) {
  if (has(name)) throw ConfigError("duplicate parameter block: " + name);
  Block b;
  b.name = std::move(name);
  b.offset = total_;
  total_ += init.size();
  b.value = std::move(init);
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

int ParamStore::id(std::string_view name) const {
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name == name) return static_cast<int>(i);
  }
  throw ConfigError("unknown parameter block: " + std::string(name));
}

bool ParamStore::has(std::string_view name) const {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [&](const Block& b) { return b.name == name; });
}

std::vector<double> ParamStore::flatten() const {
  std::vector<double> flat(static_cast<size_t>(total_));
  for (const Block& b : blocks_) {
    std::copy(b.value.data.begin(), b.value.data.end(),
              flat.begin() + static_cast<ptrdiff_t>(b.offset));
  }
  return flat;
}

void ParamStore::load_flat(std::span<const double> flat) {
  if (static_cast<int64_t>(flat.size()) != total_) {
    throw ShapeError("flat parameter vector has length " + std::to_string(flat.size()) +
                     ", store holds " + std::to_string(total_));
  }
  for (Block& b : blocks_) {
    std::copy(flat.begin() + static_cast<ptrdiff_t>(b.offset),
              flat.begin() + static_cast<ptrdiff_t>(b.offset + b.value.size()),
              b.value.data.begin());
  }
}

std::span<double> ParamStore::block_span(std::span<double> flat, int block) const {
  const Block& b = blocks_[static_cast<size_t>(block)];
  return flat.subspan(static_cast<size_t>(b.offset), static_cast<size_t>(b.value.size()));
}

std::span<const double> ParamStore::block_span(std::span<const double> flat, int block) const {
  const Block& b = blocks_[static_cast<size_t>(block)];
  return flat.subspan(static_cast<size_t>(b.offset), static_cast<size_t>(b.value.size()));
}

}  // namespace fcstgnn
