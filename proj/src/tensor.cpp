#include "fcstgnn/tensor.hpp"

#include <cmath>
#include <sstream>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int e : s) n *= e;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << ")";
  return os.str();
}

static void validate_shape(const Shape& s) {
  if (s.empty()) throw ShapeError("tensor shape must have at least one extent");
  for (int e : s) {
    if (e < 1) throw ShapeError("tensor extents must be >= 1, got " + shape_str(s));
  }
}

Tensor::Tensor(Shape s) : shape(std::move(s)) {
  validate_shape(shape);
  data.assign(static_cast<size_t>(shape_numel(shape)), 0.0);
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
  validate_shape(shape);
  if (shape_numel(shape) != static_cast<int64_t>(data.size())) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + shape_str(shape));
  }
}

Tensor Tensor::full(Shape s, double v) {
  Tensor t(std::move(s));
  for (double& x : t.data) x = v;
  return t;
}

Tensor Tensor::row(std::vector<double> values) {
  int n = static_cast<int>(values.size());
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(int rows, int cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::identity(int n) {
  Tensor t({n, n});
  for (int i = 0; i < n; ++i) t.at2(i, i) = 1.0;
  return t;
}

bool all_finite(const Tensor& t) {
  for (double x : t.data) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace fcstgnn
