#include <immintrin.h>

#include <cstddef>

#include "gripsim/kernels.hpp"

namespace gripsim::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

}  // namespace

Moments moments(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();

  // Two independent accumulator sets hide the add latency.
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd(), q1 = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(p + i);
    const __m256d v1 = _mm256_loadu_pd(p + i + 4);
    s0 = _mm256_add_pd(s0, v0);
    s1 = _mm256_add_pd(s1, v1);
    a0 = _mm256_add_pd(a0, abs_pd(v0));
    a1 = _mm256_add_pd(a1, abs_pd(v1));
    q0 = _mm256_add_pd(q0, _mm256_mul_pd(v0, v0));
    q1 = _mm256_add_pd(q1, _mm256_mul_pd(v1, v1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(p + i);
    s0 = _mm256_add_pd(s0, v0);
    a0 = _mm256_add_pd(a0, abs_pd(v0));
    q0 = _mm256_add_pd(q0, _mm256_mul_pd(v0, v0));
  }

  Moments m;
  m.sum = hsum(_mm256_add_pd(s0, s1));
  m.sum_abs = hsum(_mm256_add_pd(a0, a1));
  m.sum_sq = hsum(_mm256_add_pd(q0, q1));
  for (; i < n; ++i) {
    const double v = p[i];
    m.sum += v;
    m.sum_abs += v < 0.0 ? -v : v;
    m.sum_sq += v * v;
  }
  return m;
}

double squared_deviation(std::span<const double> x, double center) {
  const double* p = x.data();
  const std::size_t n = x.size();
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(p + i), c);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(p + i + 4), c);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(p + i), c);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = p[i] - center;
    acc += d * d;
  }
  return acc;
}

}  // namespace gripsim::kernels::avx2
