// Times the OpenMP kernels against the serial reference implementations on
// the shapes the model actually produces, and checks they agree while at it.
// Build target: fcstg_bench. Wall times are medians over repeated runs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "fcstgnn/kernels.hpp"
#include "fcstgnn/rng.hpp"

using namespace fcstgnn;

namespace {

std::vector<double> random_buffer(Rng& rng, int64_t n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (double& x : v) x = rng.normal();
  return v;
}

double median_seconds(const std::function<void()>& body, int repeats) {
  std::vector<double> times;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    times.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

void row(const char* name, double serial_s, double parallel_s, double diff) {
  std::printf("%-22s %10.3f %10.3f %9.2fx %12.3g\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s, diff);
}

}  // namespace

int main() {
  Rng rng(42);
  const int repeats = 7;

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-22s %10s %10s %10s %12s\n", "kernel", "serial ms", "omp ms",
              "speedup", "max |diff|");

  {
    const int m = 384, n = 384, k = 384;
    const std::vector<double> a = random_buffer(rng, int64_t{m} * k);
    const std::vector<double> b = random_buffer(rng, int64_t{k} * n);
    std::vector<double> c_ref(size_t{m} * n), c_omp(size_t{m} * n);
    const double ts = median_seconds(
        [&] { refkernels::gemm(false, false, m, n, k, a.data(), b.data(), c_ref.data(), false); },
        repeats);
    const double tp = median_seconds(
        [&] { kernels::gemm(false, false, m, n, k, a.data(), b.data(), c_omp.data(), false); },
        repeats);
    row("gemm 384x384x384", ts, tp, max_abs_diff(c_ref, c_omp));
  }

  {
    const int m = 384, n = 384, k = 384;
    const std::vector<double> a = random_buffer(rng, int64_t{k} * m);
    const std::vector<double> b = random_buffer(rng, int64_t{k} * n);
    std::vector<double> c_ref(size_t{m} * n), c_omp(size_t{m} * n);
    const double ts = median_seconds(
        [&] { refkernels::gemm(true, false, m, n, k, a.data(), b.data(), c_ref.data(), false); },
        repeats);
    const double tp = median_seconds(
        [&] { kernels::gemm(true, false, m, n, k, a.data(), b.data(), c_omp.data(), false); },
        repeats);
    row("gemm aT*b 384^3", ts, tp, max_abs_diff(c_ref, c_omp));
  }

  {
    const int64_t rows = 4096, cols = 256;
    const std::vector<double> x = random_buffer(rng, rows * cols);
    std::vector<double> y_ref(static_cast<size_t>(rows * cols));
    std::vector<double> y_omp(y_ref.size());
    const double ts = median_seconds(
        [&] { refkernels::softmax_rows(x.data(), y_ref.data(), rows, cols); }, repeats);
    const double tp = median_seconds(
        [&] { kernels::softmax_rows(x.data(), y_omp.data(), rows, cols); }, repeats);
    row("softmax 4096x256", ts, tp, max_abs_diff(y_ref, y_omp));
  }

  {
    const int64_t outer = 64, axis = 256, inner = 512;
    const std::vector<double> x = random_buffer(rng, outer * axis * inner);
    std::vector<double> y_ref(static_cast<size_t>(outer * inner));
    std::vector<double> y_omp(y_ref.size());
    const double ts = median_seconds(
        [&] { refkernels::mean_axis(x.data(), y_ref.data(), outer, axis, inner); },
        repeats);
    const double tp = median_seconds(
        [&] { kernels::mean_axis(x.data(), y_omp.data(), outer, axis, inner); }, repeats);
    row("mean_axis 64x256x512", ts, tp, max_abs_diff(y_ref, y_omp));
  }

  {
    const int64_t n = int64_t{1} << 24;
    const std::vector<double> a = random_buffer(rng, n);
    const std::vector<double> b = random_buffer(rng, n);
    std::vector<double> y_ref(static_cast<size_t>(n)), y_omp(static_cast<size_t>(n));
    const double ts = median_seconds(
        [&] { refkernels::mul(a.data(), b.data(), y_ref.data(), n); }, repeats);
    const double tp =
        median_seconds([&] { kernels::mul(a.data(), b.data(), y_omp.data(), n); }, repeats);
    row("mul 16M", ts, tp, max_abs_diff(y_ref, y_omp));
  }

  {
    const int64_t n = int64_t{1} << 24;
    const std::vector<double> x = random_buffer(rng, n);
    double s_ref = 0.0, s_omp = 0.0;
    const double ts = median_seconds([&] { s_ref = refkernels::sum(x.data(), n); }, repeats);
    const double tp = median_seconds([&] { s_omp = kernels::sum(x.data(), n); }, repeats);
    row("sum 16M", ts, tp, std::abs(s_ref - s_omp));
  }

  return 0;
}
