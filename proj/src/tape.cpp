#include "fcstgnn/tape.hpp"

#include <cassert>
#include <cmath>
#include <utility>

#include "fcstgnn/errors.hpp"
#include "fcstgnn/kernels.hpp"
#include "fcstgnn/params.hpp"

namespace fcstgnn {

namespace testhook {
bool corrupt_relu_backward = false;
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kParam: return "param";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "mul";
    case OpKind::kScalarMul: return "scalar-mul";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kSoftmaxLast: return "softmax-over-last-axis";
    case OpKind::kMeanAxis: return "mean-over-axis";
    case OpKind::kConcatAxis: return "concat-over-axis";
    case OpKind::kReshape: return "reshape";
    case OpKind::kTransposeLast2: return "transpose-last-two";
    case OpKind::kSin: return "sin";
    case OpKind::kCos: return "cos";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSumAll: return "sum";
    case OpKind::kSliceRows: return "slice-rows";
  }
  return "?";
}

const Tensor& Var::value() const {
  assert(tape != nullptr && id >= 0);
  return tape->node(id).value;
}

const Shape& Var::shape() const { return value().shape; }

double Var::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) {
    throw ShapeError("scalar() on a node of shape " + shape_str(v.shape));
  }
  return v.data[0];
}

namespace {

std::string index_str(const Shape& shape, int64_t flat) {
  std::vector<int64_t> idx(shape.size());
  for (int a = static_cast<int>(shape.size()) - 1; a >= 0; --a) {
    idx[static_cast<size_t>(a)] = flat % shape[static_cast<size_t>(a)];
    flat /= shape[static_cast<size_t>(a)];
  }
  std::string s = "(";
  for (size_t a = 0; a < idx.size(); ++a) {
    if (a) s += ',';
    s += std::to_string(idx[a]);
  }
  s += ')';
  return s;
}

void check_finite(const Tape::Node& n) {
  const Tensor& v = n.value;
  for (int64_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v.data[static_cast<size_t>(i)])) {
      throw NumericFault(std::string("non-finite output of ") + op_name(n.kind) +
                         " at " + index_str(v.shape, i));
    }
  }
}

Tape* same_tape(Var a, [[maybe_unused]] Var b) {
  assert(a.tape != nullptr && a.tape == b.tape);
  return a.tape;
}

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " +
                   shape_str(b) + " do not conform");
}

}  // namespace

Var Tape::push(Node n) {
  if (n.kind != OpKind::kLeaf && n.kind != OpKind::kParam) check_finite(n);
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  return Var{this, id};
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.kind = OpKind::kLeaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(const ParamStore& store, int block) {
  Node n;
  n.kind = OpKind::kParam;
  n.value = store.value(block);
  n.param_offset = store.offset(block);
  return push(std::move(n));
}

Var matmul(Var a, Var b) {
  Tape* t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.cols() != bv.rows()) {
    shape_fail("matmul", av.shape, bv.shape);
  }
  Tape::Node n;
  n.kind = OpKind::kMatmul;
  n.inputs = {a.id, b.id};
  n.value = Tensor({av.rows(), bv.cols()});
  kernels::gemm(false, false, av.rows(), bv.cols(), av.cols(), av.data.data(),
                bv.data.data(), n.value.data.data(), false);
  return t->push(std::move(n));
}

Var add(Var a, Var b) {
  Tape* t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tape::Node n;
  n.kind = OpKind::kAdd;
  n.inputs = {a.id, b.id};
  n.value = Tensor(av.shape);
  if (av.shape == bv.shape) {
    kernels::add(av.data.data(), bv.data.data(), n.value.data.data(), av.size());
  } else if (bv.rank() == 1 && av.extent(av.rank() - 1) == bv.extent(0)) {
    const int64_t cols = bv.size();
    kernels::add_row_broadcast(av.data.data(), bv.data.data(), n.value.data.data(),
                               av.size() / cols, cols);
  } else {
    shape_fail("add", av.shape, bv.shape);
  }
  return t->push(std::move(n));
}

Var mul(Var a, Var b) {
  Tape* t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.shape != bv.shape) shape_fail("mul", av.shape, bv.shape);
  Tape::Node n;
  n.kind = OpKind::kMul;
  n.inputs = {a.id, b.id};
  n.value = Tensor(av.shape);
  kernels::mul(av.data.data(), bv.data.data(), n.value.data.data(), av.size());
  return t->push(std::move(n));
}

Var scalar_mul(Var a, double factor) {
  const Tensor& av = a.value();
  Tape::Node n;
  n.kind = OpKind::kScalarMul;
  n.inputs = {a.id};
  n.factor = factor;
  n.value = Tensor(av.shape);
  kernels::scale(av.data.data(), factor, n.value.data.data(), av.size());
  return a.tape->push(std::move(n));
}

namespace {

Var unary(Var a, OpKind kind, void (*fn)(const double*, double*, int64_t)) {
  const Tensor& av = a.value();
  Tape::Node n;
  n.kind = kind;
  n.inputs = {a.id};
  n.value = Tensor(av.shape);
  fn(av.data.data(), n.value.data.data(), av.size());
  return a.tape->push(std::move(n));
}

void sin_kernel(const double* x, double* y, int64_t count) {
  for (int64_t i = 0; i < count; ++i) y[i] = std::sin(x[i]);
}
void cos_kernel(const double* x, double* y, int64_t count) {
  for (int64_t i = 0; i < count; ++i) y[i] = std::cos(x[i]);
}
void exp_kernel(const double* x, double* y, int64_t count) {
  for (int64_t i = 0; i < count; ++i) y[i] = std::exp(x[i]);
}
void log_kernel(const double* x, double* y, int64_t count) {
  for (int64_t i = 0; i < count; ++i) y[i] = std::log(x[i]);
}

}  // namespace

Var relu(Var a) { return unary(a, OpKind::kRelu, kernels::relu); }
Var sigmoid(Var a) { return unary(a, OpKind::kSigmoid, kernels::sigmoid); }
Var sin(Var a) { return unary(a, OpKind::kSin, sin_kernel); }
Var cos(Var a) { return unary(a, OpKind::kCos, cos_kernel); }
Var exp(Var a) { return unary(a, OpKind::kExp, exp_kernel); }
Var log(Var a) { return unary(a, OpKind::kLog, log_kernel); }

Var softmax_last(Var a) {
  const Tensor& av = a.value();
  const int64_t cols = av.extent(av.rank() - 1);
  Tape::Node n;
  n.kind = OpKind::kSoftmaxLast;
  n.inputs = {a.id};
  n.value = Tensor(av.shape);
  kernels::softmax_rows(av.data.data(), n.value.data.data(), av.size() / cols, cols);
  return a.tape->push(std::move(n));
}

namespace {

// Extent products on either side of an axis, for viewing a tensor as
// outer x shape[axis] x inner.
void axis_split(const Shape& shape, int axis, int64_t* outer, int64_t* inner) {
  *outer = 1;
  *inner = 1;
  for (int a = 0; a < axis; ++a) *outer *= shape[static_cast<size_t>(a)];
  for (int a = axis + 1; a < static_cast<int>(shape.size()); ++a) {
    *inner *= shape[static_cast<size_t>(a)];
  }
}

}  // namespace

Var mean_axis(Var a, int axis) {
  const Tensor& av = a.value();
  if (axis < 0 || axis >= av.rank()) {
    throw ShapeError("mean-over-axis: axis " + std::to_string(axis) +
                     " out of range for shape " + shape_str(av.shape));
  }
  int64_t outer = 0, inner = 0;
  axis_split(av.shape, axis, &outer, &inner);
  Shape out = av.shape;
  out.erase(out.begin() + axis);
  if (out.empty()) out = {1};
  Tape::Node n;
  n.kind = OpKind::kMeanAxis;
  n.inputs = {a.id};
  n.axis = axis;
  n.value = Tensor(out);
  kernels::mean_axis(av.data.data(), n.value.data.data(), outer, av.extent(axis), inner);
  return a.tape->push(std::move(n));
}

Var concat_axis(const std::vector<Var>& parts, int axis) {
  assert(!parts.empty());
  Tape* t = parts[0].tape;
  const Shape first = parts[0].value().shape;
  const int rank = static_cast<int>(first.size());
  if (axis < 0 || axis >= rank) {
    throw ShapeError("concat-over-axis: axis " + std::to_string(axis) +
                     " out of range for shape " + shape_str(first));
  }
  int64_t total = 0;
  for (const Var& p : parts) {
    assert(p.tape == t);
    const Tensor& pv = p.value();
    bool ok = pv.rank() == rank;
    for (int a = 0; ok && a < rank; ++a) {
      ok = a == axis || pv.extent(a) == first[static_cast<size_t>(a)];
    }
    if (!ok) shape_fail("concat-over-axis", first, pv.shape);
    total += pv.extent(axis);
  }
  int64_t outer = 0, inner = 0;
  axis_split(first, axis, &outer, &inner);
  Shape out = first;
  out[static_cast<size_t>(axis)] = static_cast<int>(total);

  Tape::Node n;
  n.kind = OpKind::kConcatAxis;
  n.axis = axis;
  n.value = Tensor(out);
  const int64_t out_stride = total * inner;
  int64_t off = 0;
  for (const Var& p : parts) {
    n.inputs.push_back(p.id);
    const Tensor& pv = p.value();
    const int64_t block = pv.extent(axis) * inner;
    for (int64_t o = 0; o < outer; ++o) {
      const double* src = pv.data.data() + o * block;
      double* dst = n.value.data.data() + o * out_stride + off;
      for (int64_t i = 0; i < block; ++i) dst[i] = src[i];
    }
    off += block;
  }
  return t->push(std::move(n));
}

Var reshape(Var a, Shape shape) {
  const Tensor& av = a.value();
  if (shape_numel(shape) != av.size()) shape_fail("reshape", av.shape, shape);
  Tape::Node n;
  n.kind = OpKind::kReshape;
  n.inputs = {a.id};
  n.value = Tensor(std::move(shape), av.data);
  return a.tape->push(std::move(n));
}

Var transpose_last2(Var a) {
  const Tensor& av = a.value();
  if (av.rank() != 2) {
    throw ShapeError("transpose-last-two: need a rank-2 tensor, got shape " +
                     shape_str(av.shape));
  }
  Tape::Node n;
  n.kind = OpKind::kTransposeLast2;
  n.inputs = {a.id};
  n.value = Tensor({av.cols(), av.rows()});
  for (int i = 0; i < av.rows(); ++i) {
    for (int j = 0; j < av.cols(); ++j) n.value.at2(j, i) = av.at2(i, j);
  }
  return a.tape->push(std::move(n));
}

Var sum_all(Var a) {
  const Tensor& av = a.value();
  Tape::Node n;
  n.kind = OpKind::kSumAll;
  n.inputs = {a.id};
  n.value = Tensor({1}, {kernels::sum(av.data.data(), av.size())});
  return a.tape->push(std::move(n));
}

Var slice_rows(Var a, int row0, int row1) {
  const Tensor& av = a.value();
  if (av.rank() != 2 || row0 < 0 || row1 <= row0 || row1 > av.rows()) {
    throw ShapeError("slice-rows: rows [" + std::to_string(row0) + ", " +
                     std::to_string(row1) + ") invalid for shape " + shape_str(av.shape));
  }
  Tape::Node n;
  n.kind = OpKind::kSliceRows;
  n.inputs = {a.id};
  n.row0 = row0;
  n.row1 = row1;
  const int cols = av.cols();
  n.value = Tensor({row1 - row0, cols});
  const double* src = av.data.data() + static_cast<int64_t>(row0) * cols;
  for (int64_t i = 0; i < n.value.size(); ++i) n.value.data[static_cast<size_t>(i)] = src[i];
  return a.tape->push(std::move(n));
}

void Tape::backward(Var loss) { backward(loss, std::span<double>{}); }

void Tape::backward(Var loss, std::span<double> param_grads) {
  assert(loss.tape == this && loss.id >= 0 && loss.id < size());
  if (nodes_[static_cast<size_t>(loss.id)].value.size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     shape_str(nodes_[static_cast<size_t>(loss.id)].value.shape));
  }
  grads_.clear();
  grads_.reserve(nodes_.size());
  for (const Node& n : nodes_) grads_.emplace_back(n.value.shape);
  grads_[static_cast<size_t>(loss.id)].data[0] = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<size_t>(id)];
    const Tensor& dy = grads_[static_cast<size_t>(id)];
    switch (n.kind) {
      case OpKind::kLeaf:
        break;
      case OpKind::kParam: {
        if (!param_grads.empty()) {
          if (n.param_offset + n.value.size() > static_cast<int64_t>(param_grads.size())) {
            throw ShapeError("backward: parameter gradient buffer of length " +
                             std::to_string(param_grads.size()) +
                             " does not cover block at offset " +
                             std::to_string(n.param_offset));
          }
          kernels::accum(dy.data.data(), param_grads.data() + n.param_offset,
                         n.value.size());
        }
        break;
      }
      case OpKind::kMatmul: {
        const Tensor& av = nodes_[static_cast<size_t>(n.inputs[0])].value;
        const Tensor& bv = nodes_[static_cast<size_t>(n.inputs[1])].value;
        Tensor& da = grads_[static_cast<size_t>(n.inputs[0])];
        Tensor& db = grads_[static_cast<size_t>(n.inputs[1])];
        kernels::gemm(false, true, av.rows(), av.cols(), bv.cols(), dy.data.data(),
                      bv.data.data(), da.data.data(), true);
        kernels::gemm(true, false, bv.rows(), bv.cols(), av.rows(), av.data.data(),
                      dy.data.data(), db.data.data(), true);
        break;
      }
      case OpKind::kAdd: {
        const Tensor& bv = nodes_[static_cast<size_t>(n.inputs[1])].value;
        kernels::accum(dy.data.data(), grads_[static_cast<size_t>(n.inputs[0])].data.data(),
                       dy.size());
        Tensor& db = grads_[static_cast<size_t>(n.inputs[1])];
        if (bv.shape == n.value.shape) {
          kernels::accum(dy.data.data(), db.data.data(), dy.size());
        } else {
          const int64_t cols = bv.size();
          const int64_t rows = dy.size() / cols;
          for (int64_t r = 0; r < rows; ++r) {
            const double* row = dy.data.data() + r * cols;
            for (int64_t j = 0; j < cols; ++j) db.data[static_cast<size_t>(j)] += row[j];
          }
        }
        break;
      }
      case OpKind::kMul: {
        const Tensor& av = nodes_[static_cast<size_t>(n.inputs[0])].value;
        const Tensor& bv = nodes_[static_cast<size_t>(n.inputs[1])].value;
        kernels::mul_accum(dy.data.data(), bv.data.data(),
                           grads_[static_cast<size_t>(n.inputs[0])].data.data(), dy.size());
        kernels::mul_accum(dy.data.data(), av.data.data(),
                           grads_[static_cast<size_t>(n.inputs[1])].data.data(), dy.size());
        break;
      }
      case OpKind::kScalarMul:
        kernels::accum_scaled(dy.data.data(), n.factor,
                              grads_[static_cast<size_t>(n.inputs[0])].data.data(),
                              dy.size());
        break;
      case OpKind::kRelu: {
        const Tensor& xv = nodes_[static_cast<size_t>(n.inputs[0])].value;
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        if (testhook::corrupt_relu_backward) {
          for (int64_t i = 0; i < dy.size(); ++i) {
            if (xv.data[static_cast<size_t>(i)] > 0.0) {
              dx.data[static_cast<size_t>(i)] += 1.01 * dy.data[static_cast<size_t>(i)];
            }
          }
        } else {
          kernels::relu_backward_accum(xv.data.data(), dy.data.data(), dx.data.data(),
                                       dy.size());
        }
        break;
      }
      case OpKind::kSigmoid:
        kernels::sigmoid_backward_accum(n.value.data.data(), dy.data.data(),
                                        grads_[static_cast<size_t>(n.inputs[0])].data.data(),
                                        dy.size());
        break;
      case OpKind::kSoftmaxLast: {
        const int64_t cols = n.value.extent(n.value.rank() - 1);
        kernels::softmax_rows_backward_accum(
            n.value.data.data(), dy.data.data(),
            grads_[static_cast<size_t>(n.inputs[0])].data.data(), dy.size() / cols, cols);
        break;
      }
      case OpKind::kMeanAxis: {
        const Tensor& xv = nodes_[static_cast<size_t>(n.inputs[0])].value;
        int64_t outer = 0, inner = 0;
        axis_split(xv.shape, n.axis, &outer, &inner);
        kernels::mean_axis_backward_accum(dy.data.data(),
                                          grads_[static_cast<size_t>(n.inputs[0])].data.data(),
                                          outer, xv.extent(n.axis), inner);
        break;
      }
      case OpKind::kConcatAxis: {
        int64_t outer = 0, inner = 0;
        axis_split(n.value.shape, n.axis, &outer, &inner);
        const int64_t out_stride = n.value.extent(n.axis) * inner;
        int64_t off = 0;
        for (int input : n.inputs) {
          Tensor& dx = grads_[static_cast<size_t>(input)];
          const int64_t block = dx.extent(n.axis) * inner;
          for (int64_t o = 0; o < outer; ++o) {
            kernels::accum(dy.data.data() + o * out_stride + off,
                           dx.data.data() + o * block, block);
          }
          off += block;
        }
        break;
      }
      case OpKind::kReshape:
        kernels::accum(dy.data.data(), grads_[static_cast<size_t>(n.inputs[0])].data.data(),
                       dy.size());
        break;
      case OpKind::kTransposeLast2: {
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        for (int i = 0; i < dy.rows(); ++i) {
          for (int j = 0; j < dy.cols(); ++j) dx.at2(j, i) += dy.at2(i, j);
        }
        break;
      }
      case OpKind::kSin: {
        const Tensor& xv = nodes_[static_cast<size_t>(n.inputs[0])].value;
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        for (int64_t i = 0; i < dy.size(); ++i) {
          dx.data[static_cast<size_t>(i)] +=
              dy.data[static_cast<size_t>(i)] * std::cos(xv.data[static_cast<size_t>(i)]);
        }
        break;
      }
      case OpKind::kCos: {
        const Tensor& xv = nodes_[static_cast<size_t>(n.inputs[0])].value;
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        for (int64_t i = 0; i < dy.size(); ++i) {
          dx.data[static_cast<size_t>(i)] -=
              dy.data[static_cast<size_t>(i)] * std::sin(xv.data[static_cast<size_t>(i)]);
        }
        break;
      }
      case OpKind::kExp:
        kernels::mul_accum(dy.data.data(), n.value.data.data(),
                           grads_[static_cast<size_t>(n.inputs[0])].data.data(), dy.size());
        break;
      case OpKind::kLog: {
        const Tensor& xv = nodes_[static_cast<size_t>(n.inputs[0])].value;
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        for (int64_t i = 0; i < dy.size(); ++i) {
          dx.data[static_cast<size_t>(i)] +=
              dy.data[static_cast<size_t>(i)] / xv.data[static_cast<size_t>(i)];
        }
        break;
      }
      case OpKind::kSumAll: {
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        const double g = dy.data[0];
        for (double& v : dx.data) v += g;
        break;
      }
      case OpKind::kSliceRows: {
        Tensor& dx = grads_[static_cast<size_t>(n.inputs[0])];
        const int64_t cols = dx.cols();
        kernels::accum(dy.data.data(), dx.data.data() + n.row0 * cols, dy.size());
        break;
      }
    }
  }
}

const Tensor& Tape::grad_of(Var v) const {
  assert(v.tape == this && v.id >= 0 && v.id < size());
  assert(grads_.size() == nodes_.size() && "backward() has not run");
  return grads_[static_cast<size_t>(v.id)];
}

}  // namespace fcstgnn
