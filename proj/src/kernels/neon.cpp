#include <arm_neon.h>

#include <cstddef>

#include "gripsim/kernels.hpp"

namespace gripsim::kernels::neon {

Moments moments(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  float64x2_t s = vdupq_n_f64(0.0), a = vdupq_n_f64(0.0), q = vdupq_n_f64(0.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(p + i);
    s = vaddq_f64(s, v);
    a = vaddq_f64(a, vabsq_f64(v));
    q = vaddq_f64(q, vmulq_f64(v, v));
  }

  Moments m{vaddvq_f64(s), vaddvq_f64(a), vaddvq_f64(q)};
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
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t acc = vdupq_n_f64(0.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(p + i), c);
    acc = vaddq_f64(acc, vmulq_f64(d, d));
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = p[i] - center;
    r += d * d;
  }
  return r;
}

}  // namespace gripsim::kernels::neon
