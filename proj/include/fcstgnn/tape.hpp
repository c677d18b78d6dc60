#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fcstgnn/tensor.hpp"

namespace fcstgnn {

class ParamStore;
class Tape;

// Handle to a node on a Tape. Plain value; valid only while the tape lives.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  const Shape& shape() const;
  // Value of a one-element node; anything else is a shape error.
  double scalar() const;
};

enum class OpKind : uint8_t {
  kLeaf,
  kParam,
  kMatmul,
  kAdd,
  kMul,
  kScalarMul,
  kRelu,
  kSigmoid,
  kSoftmaxLast,
  kMeanAxis,
  kConcatAxis,
  kReshape,
  kTransposeLast2,
  kSin,
  kCos,
  kExp,
  kLog,
  kSumAll,
  kSliceRows,
};

const char* op_name(OpKind kind);

// Define-by-run reverse-mode tape. A fresh tape is built for every forward
// pass. Node ids are append order, so every node's inputs have smaller ids
// and backward() can walk ids in strictly decreasing order, visiting each
// node exactly once.
class Tape {
 public:
  struct Node {
    OpKind kind = OpKind::kLeaf;
    Tensor value;
    std::vector<int> inputs;
    double factor = 0.0;        // kScalarMul
    int axis = -1;              // kMeanAxis, kConcatAxis
    int row0 = 0;               // kSliceRows
    int row1 = 0;
    int64_t param_offset = -1;  // kParam: offset into the flat parameter vector
  };

  // Constant input; receives a gradient but is not a parameter.
  Var leaf(Tensor value);

  // Copies the block's current value out of the store. backward(loss, grads)
  // adds this node's gradient into grads at the block's offset within the
  // store's flat layout.
  Var param(const ParamStore& store, int block);

  // Reverse sweep from a scalar loss. Gradients for every node with
  // id <= loss.id become readable through grad_of. The span overload also
  // accumulates (+=) parameter gradients into param_grads, which must cover
  // the store's full flat layout; callers zero it themselves, so per-sample
  // losses can share one buffer.
  void backward(Var loss);
  void backward(Var loss, std::span<double> param_grads);

  // Gradient of the last backward()'s loss with respect to node v.
  const Tensor& grad_of(Var v) const;

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }

  // Appends a node and returns its handle. Used by the op constructors below;
  // not meant to be called directly.
  Var push(Node n);

 private:
  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

// Op constructors. Each validates shapes (ShapeError names the op and the
// offending shapes), computes the value, and raises NumericFault if any
// output element is non-finite.

// (m x k) times (k x n). Rank-2 operands only.
Var matmul(Var a, Var b);
// Equal shapes, or b rank-1 broadcast over the last axis of a (bias add).
Var add(Var a, Var b);
// Elementwise product, equal shapes.
Var mul(Var a, Var b);
Var scalar_mul(Var a, double factor);
Var relu(Var a);
Var sigmoid(Var a);
// Softmax over the last axis with max subtraction; rows sum to 1.
Var softmax_last(Var a);
// Mean over one axis; the axis is removed from the shape.
Var mean_axis(Var a, int axis);
// Parts must agree on every extent except the concat axis.
Var concat_axis(const std::vector<Var>& parts, int axis);
Var reshape(Var a, Shape shape);
Var transpose_last2(Var a);
Var sin(Var a);
Var cos(Var a);
Var exp(Var a);
Var log(Var a);
// Scalar (shape {1}) sum of all elements.
Var sum_all(Var a);
// Rows [row0, row1) of a rank-2 tensor.
Var slice_rows(Var a, int row0, int row1);

namespace testhook {
// Scales the relu backward rule by 1.01 when set. Exists so the gradient
// checker's failure path can be exercised on demand; never set in real runs.
extern bool corrupt_relu_backward;
}  // namespace testhook

}  // namespace fcstgnn
