#include "fcstgnn/kernels.hpp"

#include <cassert>
#include <cmath>

namespace fcstgnn::kernels {

// Below these sizes the OpenMP fork/join costs more than the loop.
static constexpr int64_t kGemmCutoff = 1 << 15;
static constexpr int64_t kElemCutoff = 1 << 14;

void gemm(bool trans_a, bool trans_b, int m, int n, int k,
          const double* a, const double* b, double* c, bool accumulate) {
  assert(!(trans_a && trans_b));
  const int64_t work = static_cast<int64_t>(m) * n * k;
  if (!accumulate) {
    const int64_t total = static_cast<int64_t>(m) * n;
    for (int64_t i = 0; i < total; ++i) c[i] = 0.0;
  }
  if (!trans_a && !trans_b) {
#pragma omp parallel for schedule(static) if (work > kGemmCutoff)
    for (int i = 0; i < m; ++i) {
      double* crow = c + static_cast<int64_t>(i) * n;
      const double* arow = a + static_cast<int64_t>(i) * k;
      for (int p = 0; p < k; ++p) {
        const double aip = arow[p];
        const double* brow = b + static_cast<int64_t>(p) * n;
        for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
      }
    }
  } else if (trans_a) {
    // a is k x m
#pragma omp parallel for schedule(static) if (work > kGemmCutoff)
    for (int i = 0; i < m; ++i) {
      double* crow = c + static_cast<int64_t>(i) * n;
      for (int p = 0; p < k; ++p) {
        const double aip = a[static_cast<int64_t>(p) * m + i];
        const double* brow = b + static_cast<int64_t>(p) * n;
        for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
      }
    }
  } else {
    // b is n x k
#pragma omp parallel for schedule(static) if (work > kGemmCutoff)
    for (int i = 0; i < m; ++i) {
      double* crow = c + static_cast<int64_t>(i) * n;
      const double* arow = a + static_cast<int64_t>(i) * k;
      for (int j = 0; j < n; ++j) {
        const double* brow = b + static_cast<int64_t>(j) * k;
        double acc = 0.0;
        for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
        crow[j] += acc;
      }
    }
  }
}

void add(const double* a, const double* b, double* out, int64_t n) {
#pragma omp parallel for schedule(static) if (n > kElemCutoff)
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void add_row_broadcast(const double* a, const double* row, double* out,
                       int64_t rows, int64_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols > kElemCutoff)
  for (int64_t r = 0; r < rows; ++r) {
    const double* arow = a + r * cols;
    double* orow = out + r * cols;
    for (int64_t j = 0; j < cols; ++j) orow[j] = arow[j] + row[j];
  }
}

void mul(const double* a, const double* b, double* out, int64_t n) {
#pragma omp parallel for schedule(static) if (n > kElemCutoff)
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(const double* a, double c, double* out, int64_t n) {
#pragma omp parallel for schedule(static) if (n > kElemCutoff)
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] * c;
}

void relu(const double* x, double* y, int64_t n) {
#pragma omp parallel for schedule(static) if (n > kElemCutoff)
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void sigmoid(const double* x, double* y, int64_t n) {
#pragma omp parallel for schedule(static) if (n > kElemCutoff)
  for (int64_t i = 0; i < n; ++i) {
    if (x[i] >= 0.0) {
      y[i] = 1.0 / (1.0 + std::exp(-x[i]));
    } else {
      const double e = std::exp(x[i]);
      y[i] = e / (1.0 + e);
    }
  }
}

void softmax_rows(const double* x, double* y, int64_t rows, int64_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols > kElemCutoff)
  for (int64_t r = 0; r < rows; ++r) {
    const double* xr = x + r * cols;
    double* yr = y + r * cols;
    double mx = xr[0];
    for (int64_t j = 1; j < cols; ++j) mx = xr[j] > mx ? xr[j] : mx;
    double denom = 0.0;
    for (int64_t j = 0; j < cols; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      denom += yr[j];
    }
    const double inv = 1.0 / denom;
    for (int64_t j = 0; j < cols; ++j) yr[j] *= inv;
  }
}

void mean_axis(const double* x, double* y, int64_t outer, int64_t axis, int64_t inner) {
  const double inv = 1.0 / static_cast<double>(axis);
#pragma omp parallel for schedule(static) if (outer * inner > kElemCutoff)
  for (int64_t o = 0; o < outer; ++o) {
    double* yo = y + o * inner;
    for (int64_t i = 0; i < inner; ++i) yo[i] = 0.0;
    for (int64_t a = 0; a < axis; ++a) {
      const double* xo = x + (o * axis + a) * inner;
      for (int64_t i = 0; i < inner; ++i) yo[i] += xo[i];
    }
    for (int64_t i = 0; i < inner; ++i) yo[i] *= inv;
  }
}

double sum(const double* x, int64_t n) {
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void accum(const double* src, double* dst, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] += src[i];
}

void accum_scaled(const double* src, double c, double* dst, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] += src[i] * c;
}

void mul_accum(const double* a, const double* b, double* dst, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
}

void relu_backward_accum(const double* x, const double* dy, double* dx, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) dx[i] += dy[i];
  }
}

void sigmoid_backward_accum(const double* y, const double* dy, double* dx, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
}

void softmax_rows_backward_accum(const double* y, const double* dy, double* dx,
                                 int64_t rows, int64_t cols) {
  for (int64_t r = 0; r < rows; ++r) {
    const double* yr = y + r * cols;
    const double* dyr = dy + r * cols;
    double* dxr = dx + r * cols;
    double dot = 0.0;
    for (int64_t j = 0; j < cols; ++j) dot += dyr[j] * yr[j];
    for (int64_t j = 0; j < cols; ++j) dxr[j] += yr[j] * (dyr[j] - dot);
  }
}

void mean_axis_backward_accum(const double* dy, double* dx, int64_t outer,
                              int64_t axis, int64_t inner) {
  const double inv = 1.0 / static_cast<double>(axis);
  for (int64_t o = 0; o < outer; ++o) {
    const double* dyo = dy + o * inner;
    for (int64_t a = 0; a < axis; ++a) {
      double* dxo = dx + (o * axis + a) * inner;
      for (int64_t i = 0; i < inner; ++i) dxo[i] += dyo[i] * inv;
    }
  }
}

}  // namespace fcstgnn::kernels

namespace fcstgnn::refkernels {

void gemm(bool trans_a, bool trans_b, int m, int n, int k,
          const double* a, const double* b, double* c, bool accumulate) {
  assert(!(trans_a && trans_b));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = accumulate ? c[static_cast<int64_t>(i) * n + j] : 0.0;
      for (int p = 0; p < k; ++p) {
        const double av = trans_a ? a[static_cast<int64_t>(p) * m + i]
                                  : a[static_cast<int64_t>(i) * k + p];
        const double bv = trans_b ? b[static_cast<int64_t>(j) * k + p]
                                  : b[static_cast<int64_t>(p) * n + j];
        acc += av * bv;
      }
      c[static_cast<int64_t>(i) * n + j] = acc;
    }
  }
}

void add(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void relu(const double* x, double* y, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void softmax_rows(const double* x, double* y, int64_t rows, int64_t cols) {
  for (int64_t r = 0; r < rows; ++r) {
    const double* xr = x + r * cols;
    double* yr = y + r * cols;
    double mx = xr[0];
    for (int64_t j = 1; j < cols; ++j) mx = xr[j] > mx ? xr[j] : mx;
    double denom = 0.0;
    for (int64_t j = 0; j < cols; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      denom += yr[j];
    }
    const double inv = 1.0 / denom;
    for (int64_t j = 0; j < cols; ++j) yr[j] *= inv;
  }
}

void mean_axis(const double* x, double* y, int64_t outer, int64_t axis, int64_t inner) {
  const double inv = 1.0 / static_cast<double>(axis);
  for (int64_t o = 0; o < outer; ++o) {
    double* yo = y + o * inner;
    for (int64_t i = 0; i < inner; ++i) yo[i] = 0.0;
    for (int64_t a = 0; a < axis; ++a) {
      const double* xo = x + (o * axis + a) * inner;
      for (int64_t i = 0; i < inner; ++i) yo[i] += xo[i];
    }
    for (int64_t i = 0; i < inner; ++i) yo[i] *= inv;
  }
}

double sum(const double* x, int64_t n) {
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace fcstgnn::refkernels
