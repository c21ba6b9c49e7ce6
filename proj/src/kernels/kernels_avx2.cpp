// Compiled with -mavx2; only reached through the runtime dispatcher.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcroute/kernels.hpp"

namespace dcroute::kernels {
namespace {

void add_constant_avx2(std::span<double> xs, double value) {
  const __m256d v = _mm256_set1_pd(value);
  double* p = xs.data();
  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(p + i, _mm256_add_pd(_mm256_loadu_pd(p + i), v));
  }
  for (; i < n; ++i) p[i] += value;
}

void min_residual_avx2(std::span<double> acc, std::span<const double> load, double capacity) {
  const __m256d cap = _mm256_set1_pd(capacity);
  double* a = acc.data();
  const double* l = load.data();
  const std::size_t n = acc.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d free = _mm256_sub_pd(cap, _mm256_loadu_pd(l + i));
    // min_pd(x, y) returns y when either is NaN; operand order matches the
    // scalar `free < acc ? free : acc`.
    _mm256_storeu_pd(a + i, _mm256_min_pd(free, _mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) {
    const double free = capacity - l[i];
    a[i] = free < a[i] ? free : a[i];
  }
}

double max_prefix_mismatch_avx2(std::span<const double> prefix, std::span<const double> load,
                                double base) {
  const std::size_t n = prefix.size();
  if (n == 0) return 0.0;
  const double* p = prefix.data();
  const double* l = load.data();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d worst = _mm256_setzero_pd();
  double tail = std::fabs((p[0] - base) - l[0]);
  std::size_t i = 1;
  for (; i + 4 <= n; i += 4) {
    const __m256d cur = _mm256_loadu_pd(p + i);
    const __m256d prev = _mm256_loadu_pd(p + i - 1);
    const __m256d diff = _mm256_sub_pd(_mm256_sub_pd(cur, prev), _mm256_loadu_pd(l + i));
    worst = _mm256_max_pd(worst, _mm256_andnot_pd(sign_mask, diff));
  }
  for (; i < n; ++i) tail = std::max(tail, std::fabs((p[i] - p[i - 1]) - l[i]));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, worst);
  return std::max({tail, lanes[0], lanes[1], lanes[2], lanes[3]});
}

double max_overload_avx2(std::span<const double> load, double capacity) {
  const std::size_t n = load.size();
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(worst);
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(load.data() + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    worst = std::max({lanes[0], lanes[1], lanes[2], lanes[3]}) - capacity;
  }
  for (; i < n; ++i) worst = std::max(worst, load[i] - capacity);
  return worst;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", add_constant_avx2, min_residual_avx2,
                                 max_prefix_mismatch_avx2, max_overload_avx2};
  return table;
}

}  // namespace dcroute::kernels
