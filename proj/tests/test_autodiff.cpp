#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <omp.h>

#include "doctest.h"

#include "fcstgnn/errors.hpp"
#include "fcstgnn/gradcheck.hpp"
#include "fcstgnn/rng.hpp"
#include "fcstgnn/tape.hpp"

using namespace fcstgnn;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// Builds the graph with build(tape, leaf vars), checks every input element's
// gradient against central differences of the produced scalar. The numeric
// side rebuilds the graph from scratch per probe, so it only trusts forward
// evaluation.
void check_graph(const std::function<Var(Tape&, const std::vector<Var>&)>& build,
                 std::vector<Tensor> inputs, double step = 1e-6,
                 double tolerance = 1e-5) {
  std::vector<const Tensor*> grads;
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Tensor& t : inputs) vars.push_back(tape.leaf(t));
  const Var loss = build(tape, vars);
  tape.backward(loss);
  for (const Var& v : vars) grads.push_back(&tape.grad_of(v));

  for (size_t k = 0; k < inputs.size(); ++k) {
    for (size_t e = 0; e < inputs[k].data.size(); ++e) {
      const double base = inputs[k].data[e];
      auto eval = [&](double x) {
        inputs[k].data[e] = x;
        Tape t2;
        std::vector<Var> vs;
        vs.reserve(inputs.size());
        for (const Tensor& t : inputs) vs.push_back(t2.leaf(t));
        const double out = build(t2, vs).scalar();
        inputs[k].data[e] = base;
        return out;
      };
      const double numeric = (eval(base + step) - eval(base - step)) / (2.0 * step);
      const double analytic = grads[k]->data[e];
      INFO("input ", k, " element ", e, " analytic ", analytic, " numeric ", numeric);
      CHECK(rel_err(analytic, numeric, 1e-6) <= tolerance);
    }
  }
}

}  // namespace

TEST_CASE("gradients of every op match finite differences over many seeds") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);

    // Weighted sum turns any output into a scalar with nonuniform weights.
    const Tensor w23 = random_tensor(rng, {2, 3});
    const Tensor w33 = random_tensor(rng, {3, 3});
    const Tensor w234 = random_tensor(rng, {2, 3, 4});

    auto weighted = [](Tape& tape, Var x, const Tensor& w) {
      return sum_all(mul(x, tape.leaf(w)));
    };

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, matmul(in[0], in[1]), w23);
        },
        {random_tensor(rng, {2, 4}), random_tensor(rng, {4, 3})});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, add(in[0], in[1]), w23);
        },
        {random_tensor(rng, {2, 3}), random_tensor(rng, {2, 3})});

    // Bias broadcast over the last axis.
    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, add(in[0], in[1]), w23);
        },
        {random_tensor(rng, {2, 3}), random_tensor(rng, {3})});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, mul(in[0], in[1]), w23);
        },
        {random_tensor(rng, {2, 3}), random_tensor(rng, {2, 3})});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, scalar_mul(in[0], -2.5), w23);
        },
        {random_tensor(rng, {2, 3})});

    // Inputs pushed away from the relu kink.
    {
      Tensor x = random_tensor(rng, {2, 3});
      for (double& v : x.data) v += (v >= 0.0 ? 0.2 : -0.2);
      check_graph(
          [&](Tape& tape, const std::vector<Var>& in) {
            return weighted(tape, relu(in[0]), w23);
          },
          {x});
    }

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, sigmoid(in[0]), w23);
        },
        {random_tensor(rng, {2, 3}, -3.0, 3.0)});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, softmax_last(in[0]), w23);
        },
        {random_tensor(rng, {2, 3}, -2.0, 2.0)});

    // Mean over the middle axis of a rank-3 tensor.
    const Tensor w24 = random_tensor(rng, {2, 4});
    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, mean_axis(in[0], 1), w24);
        },
        {w234});

    const Tensor w53 = random_tensor(rng, {5, 3});
    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, concat_axis({in[0], in[1]}, 0), w53);
        },
        {random_tensor(rng, {2, 3}), random_tensor(rng, {3, 3})});

    const Tensor w25 = random_tensor(rng, {2, 5});
    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, concat_axis({in[0], in[1]}, 1), w25);
        },
        {random_tensor(rng, {2, 3}), random_tensor(rng, {2, 2})});

    const Tensor w32 = random_tensor(rng, {3, 2});
    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, reshape(in[0], {3, 2}), w32);
        },
        {random_tensor(rng, {2, 3})});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, transpose_last2(in[0]), w32);
        },
        {random_tensor(rng, {2, 3})});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, fcstgnn::sin(in[0]), w23);
        },
        {random_tensor(rng, {2, 3}, -3.0, 3.0)});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, fcstgnn::cos(in[0]), w23);
        },
        {random_tensor(rng, {2, 3}, -3.0, 3.0)});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, fcstgnn::exp(in[0]), w23);
        },
        {random_tensor(rng, {2, 3}, -1.0, 1.0)});

    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, fcstgnn::log(in[0]), w23);
        },
        {random_tensor(rng, {2, 3}, 0.5, 2.0)});

    check_graph(
        [&](Tape&, const std::vector<Var>& in) { return sum_all(in[0]); },
        {random_tensor(rng, {2, 3})});

    const Tensor w_slice = random_tensor(rng, {2, 3});
    check_graph(
        [&](Tape& tape, const std::vector<Var>& in) {
          return weighted(tape, slice_rows(in[0], 1, 3), w_slice);
        },
        {random_tensor(rng, {4, 3})});

    // A node feeding two consumers accumulates both paths.
    check_graph(
        [&](Tape&, const std::vector<Var>& in) {
          const Var x = in[0];
          return sum_all(add(mul(x, x), scalar_mul(x, 3.0)));
        },
        {random_tensor(rng, {2, 3})});
  }
}

TEST_CASE("softmax rows are a probability distribution") {
  Rng rng(99);
  Tape tape;
  const Var x = tape.leaf(random_tensor(rng, {7, 5}, -30.0, 30.0));
  const Var y = softmax_last(x);
  for (int r = 0; r < 7; ++r) {
    double total = 0.0;
    for (int c = 0; c < 5; ++c) {
      const double p = y.value().at2(r, c);
      CHECK(p > 0.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("shape mismatches name the op and both shapes") {
  Tape tape;
  const Var a = tape.leaf(Tensor::zeros({2, 3}));
  const Var b = tape.leaf(Tensor::zeros({2, 3}));
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("matmul"), ShapeError);
  CHECK_THROWS_AS(add(a, tape.leaf(Tensor::zeros({4}))), ShapeError);
  CHECK_THROWS_AS(reshape(a, {4, 2}), ShapeError);
  CHECK_THROWS_AS(slice_rows(a, 1, 4), ShapeError);
  CHECK_THROWS_AS(concat_axis({a, tape.leaf(Tensor::zeros({2, 4}))}, 0), ShapeError);
  CHECK_THROWS_AS(mul(a, tape.leaf(Tensor::zeros({3, 2}))), ShapeError);
}

TEST_CASE("non-finite op outputs raise a numeric fault naming the op") {
  Tape tape;
  const Var x = tape.leaf(Tensor::full({1, 2}, -1.0));
  CHECK_THROWS_WITH_AS(fcstgnn::log(x), doctest::Contains("log"), NumericFault);
  const Var big = tape.leaf(Tensor::full({1, 2}, 1e300));
  CHECK_THROWS_AS(mul(big, big), NumericFault);
}

TEST_CASE("forward and backward are bitwise identical across thread counts") {
  auto run = [](int threads) {
    omp_set_num_threads(threads);
    Rng rng(5);
    Tape tape;
    Tensor a(Shape{40, 30}), b(Shape{30, 20}), w(Shape{40, 20});
    for (double& v : a.data) v = rng.normal();
    for (double& v : b.data) v = rng.normal();
    for (double& v : w.data) v = rng.normal();
    const Var va = tape.leaf(a);
    const Var vb = tape.leaf(b);
    const Var y = softmax_last(relu(matmul(va, vb)));
    const Var loss = sum_all(mul(y, tape.leaf(w)));
    tape.backward(loss);
    std::vector<double> out;
    out.push_back(loss.scalar());
    for (double v : tape.grad_of(va).data) out.push_back(v);
    for (double v : tape.grad_of(vb).data) out.push_back(v);
    return out;
  };
  const int max_threads = omp_get_max_threads();
  const std::vector<double> serial = run(1);
  const std::vector<double> parallel = run(std::max(2, max_threads));
  omp_set_num_threads(max_threads);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i] == parallel[i]);
  }
}
