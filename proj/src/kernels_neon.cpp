#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

#include <cmath>

#include "kernels_simd.hpp"

namespace cumcal::kernels::neon {

namespace {

inline float64x2_t load_outcomes(const std::uint8_t* y) {
  const double pair[2] = {static_cast<double>(y[0]), static_cast<double>(y[1])};
  return vld1q_f64(pair);
}

template <typename VectorAbs, typename ScalarAbs>
Extremum argmax_abs(std::size_t n, VectorAbs vector_abs, ScalarAbs scalar_abs) {
  if (n == 0) {
    return {};
  }
  Extremum best{0, scalar_abs(0)};
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t lane_best = vdupq_n_f64(-1.0);
    float64x2_t lane_index = vdupq_n_f64(0.0);
    const double start[2] = {0.0, 1.0};
    float64x2_t index = vld1q_f64(start);
    const float64x2_t step = vdupq_n_f64(2.0);
    for (; i + 2 <= n; i += 2) {
      const float64x2_t a = vector_abs(i);
      const uint64x2_t greater = vcgtq_f64(a, lane_best);
      lane_best = vbslq_f64(greater, a, lane_best);
      lane_index = vbslq_f64(greater, index, lane_index);
      index = vaddq_f64(index, step);
    }
    const double v0 = vgetq_lane_f64(lane_best, 0);
    const double v1 = vgetq_lane_f64(lane_best, 1);
    const auto i0 = static_cast<std::size_t>(vgetq_lane_f64(lane_index, 0));
    const auto i1 = static_cast<std::size_t>(vgetq_lane_f64(lane_index, 1));
    best = (v1 > v0 || (v1 == v0 && i1 < i0)) ? Extremum{i1, v1} : Extremum{i0, v0};
  }
  for (; i < n; ++i) {
    const double a = scalar_abs(i);
    if (a > best.value) {
      best = {i, a};
    }
  }
  return best;
}

}  // namespace

void prediction_terms(const double* p, const std::uint8_t* y, std::size_t n, double* variance,
                      double* error) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t pv = vld1q_f64(p + i);
    vst1q_f64(variance + i, vmulq_f64(pv, vsubq_f64(one, pv)));
    vst1q_f64(error + i, vsubq_f64(load_outcomes(y + i), pv));
  }
  scalar::prediction_terms(p + i, y + i, n - i, variance + i, error + i);
}

void prediction_errors(const double* p, const std::uint8_t* y, std::size_t n, double* error) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(error + i, vsubq_f64(load_outcomes(y + i), vld1q_f64(p + i)));
  }
  scalar::prediction_errors(p + i, y + i, n - i, error + i);
}

Extremum max_abs(const double* v, std::size_t n) {
  return argmax_abs(
      n, [v](std::size_t i) { return vabsq_f64(vld1q_f64(v + i)); },
      [v](std::size_t i) { return std::fabs(v[i]); });
}

Extremum bridged_max_abs(const double* walk, const double* times, std::size_t n, double terminal) {
  const float64x2_t end = vdupq_n_f64(terminal);
  return argmax_abs(
      n,
      [=](std::size_t i) {
        const float64x2_t chord = vmulq_f64(vld1q_f64(times + i), end);
        return vabsq_f64(vsubq_f64(vld1q_f64(walk + i), chord));
      },
      [=](std::size_t i) { return std::fabs(walk[i] - times[i] * terminal); });
}

}  // namespace cumcal::kernels::neon

#endif
