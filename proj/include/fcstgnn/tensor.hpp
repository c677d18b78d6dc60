#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fcstgnn {

using Shape = std::vector<int>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

/// Dense row-major tensor of 64-bit floats. Plain value type; a tensor that is
/// not recorded on a tape is treated as immutable once built and is safe to
/// share across threads.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s);
  Tensor(Shape s, std::vector<double> values);

  static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
  static Tensor full(Shape s, double v);
  static Tensor row(std::vector<double> values);
  static Tensor matrix(int rows, int cols, std::vector<double> values);
  static Tensor identity(int n);

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int extent(int axis) const { return shape[static_cast<size_t>(axis)]; }
  int rows() const { return shape[0]; }
  int cols() const { return shape[1]; }

  double& at2(int i, int j) { return data[static_cast<size_t>(i) * cols() + j]; }
  double at2(int i, int j) const { return data[static_cast<size_t>(i) * cols() + j]; }
  double& at3(int i, int j, int k) {
    return data[(static_cast<size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  double at3(int i, int j, int k) const {
    return data[(static_cast<size_t>(i) * shape[1] + j) * shape[2] + k];
  }
};

bool all_finite(const Tensor& t);

}  // namespace fcstgnn
