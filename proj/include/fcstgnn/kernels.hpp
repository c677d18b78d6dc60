#pragma once

#include <cstdint>

// Numeric inner loops. kernels:: versions parallelize with OpenMP over
// independent output rows/elements; every output element keeps a fixed serial
// accumulation order, so results do not depend on the thread count.
// refkernels:: holds plain serial versions of the forward kernels, kept as the
// reference the tests and the benchmark compare against.

namespace fcstgnn::kernels {

// c[m x n] = op_a(a) * op_b(b); op transposes its argument when the flag is
// set (a is then k x m, b is n x k). accumulate adds into c instead of
// overwriting. trans_a && trans_b is unsupported.
void gemm(bool trans_a, bool trans_b, int m, int n, int k,
          const double* a, const double* b, double* c, bool accumulate);

void add(const double* a, const double* b, double* out, int64_t n);
void add_row_broadcast(const double* a, const double* row, double* out,
                       int64_t rows, int64_t cols);
void mul(const double* a, const double* b, double* out, int64_t n);
void scale(const double* a, double c, double* out, int64_t n);
void relu(const double* x, double* y, int64_t n);
void sigmoid(const double* x, double* y, int64_t n);

// Row-wise softmax with max subtraction.
void softmax_rows(const double* x, double* y, int64_t rows, int64_t cols);

// y[o, i] = mean over a of x[o, a, i] for x viewed as outer x axis x inner.
void mean_axis(const double* x, double* y, int64_t outer, int64_t axis, int64_t inner);

double sum(const double* x, int64_t n);

// Backward accumulators (dst +=). Element order is fixed; safe to nest under
// the per-sample parallel loop.
void accum(const double* src, double* dst, int64_t n);
void accum_scaled(const double* src, double c, double* dst, int64_t n);
void mul_accum(const double* a, const double* b, double* dst, int64_t n);
void relu_backward_accum(const double* x, const double* dy, double* dx, int64_t n);
void sigmoid_backward_accum(const double* y, const double* dy, double* dx, int64_t n);
void softmax_rows_backward_accum(const double* y, const double* dy, double* dx,
                                 int64_t rows, int64_t cols);
void mean_axis_backward_accum(const double* dy, double* dx, int64_t outer,
                              int64_t axis, int64_t inner);

}  // namespace fcstgnn::kernels

namespace fcstgnn::refkernels {

void gemm(bool trans_a, bool trans_b, int m, int n, int k,
          const double* a, const double* b, double* c, bool accumulate);
void add(const double* a, const double* b, double* out, int64_t n);
void mul(const double* a, const double* b, double* out, int64_t n);
void relu(const double* x, double* y, int64_t n);
void softmax_rows(const double* x, double* y, int64_t rows, int64_t cols);
void mean_axis(const double* x, double* y, int64_t outer, int64_t axis, int64_t inner);
double sum(const double* x, int64_t n);

}  // namespace fcstgnn::refkernels
