#include <cmath>

#include "gripsim/kernels.hpp"

namespace gripsim::kernels::scalar {

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) {
    m.sum += v;
    m.sum_abs += std::abs(v);
    m.sum_sq += v * v;
  }
  return m;
}

double squared_deviation(std::span<const double> x, double center) {
  double acc = 0.0;
  for (double v : x) {
    const double d = v - center;
    acc += d * d;
  }
  return acc;
}

}  // namespace gripsim::kernels::scalar
