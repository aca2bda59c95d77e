#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "kernels_simd.hpp"

namespace cumcal::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// Four unsigned bytes widened to doubles.
inline __m256d load_outcomes(const std::uint8_t* y) {
  std::int32_t packed;
  std::memcpy(&packed, y, sizeof(packed));
  return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed)));
}

// Reduce per-lane (max, first index) pairs. Each lane keeps the first index
// at which its maximum occurred, so the smallest index among lanes sharing
// the global maximum is the global first occurrence.
inline Extremum reduce_lanes(__m256d best, __m256d best_index) {
  alignas(32) double values[4];
  alignas(32) double indices[4];
  _mm256_store_pd(values, best);
  _mm256_store_pd(indices, best_index);
  Extremum out{static_cast<std::size_t>(indices[0]), values[0]};
  for (int lane = 1; lane < 4; ++lane) {
    const auto index = static_cast<std::size_t>(indices[lane]);
    if (values[lane] > out.value || (values[lane] == out.value && index < out.index)) {
      out = {index, values[lane]};
    }
  }
  return out;
}

// `vector_abs(i)` yields |x[i..i+3]|, `scalar_abs(i)` yields |x[i]|.
template <typename VectorAbs, typename ScalarAbs>
Extremum argmax_abs(std::size_t n, VectorAbs vector_abs, ScalarAbs scalar_abs) {
  if (n == 0) {
    return {};
  }
  Extremum best{0, scalar_abs(0)};
  std::size_t i = 0;
  if (n >= 4) {
    __m256d lane_best = _mm256_set1_pd(-1.0);
    __m256d lane_index = _mm256_setzero_pd();
    __m256d index = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d step = _mm256_set1_pd(4.0);
    for (; i + 4 <= n; i += 4) {
      const __m256d a = vector_abs(i);
      const __m256d greater = _mm256_cmp_pd(a, lane_best, _CMP_GT_OQ);
      lane_best = _mm256_blendv_pd(lane_best, a, greater);
      lane_index = _mm256_blendv_pd(lane_index, index, greater);
      index = _mm256_add_pd(index, step);
    }
    best = reduce_lanes(lane_best, lane_index);
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
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pv = _mm256_loadu_pd(p + i);
    _mm256_storeu_pd(variance + i, _mm256_mul_pd(pv, _mm256_sub_pd(one, pv)));
    _mm256_storeu_pd(error + i, _mm256_sub_pd(load_outcomes(y + i), pv));
  }
  scalar::prediction_terms(p + i, y + i, n - i, variance + i, error + i);
}

void prediction_errors(const double* p, const std::uint8_t* y, std::size_t n, double* error) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(error + i, _mm256_sub_pd(load_outcomes(y + i), _mm256_loadu_pd(p + i)));
  }
  scalar::prediction_errors(p + i, y + i, n - i, error + i);
}

Extremum max_abs(const double* v, std::size_t n) {
  return argmax_abs(
      n, [v](std::size_t i) { return abs_pd(_mm256_loadu_pd(v + i)); },
      [v](std::size_t i) { return std::fabs(v[i]); });
}

Extremum bridged_max_abs(const double* walk, const double* times, std::size_t n, double terminal) {
  const __m256d end = _mm256_set1_pd(terminal);
  return argmax_abs(
      n,
      [=](std::size_t i) {
        const __m256d chord = _mm256_mul_pd(_mm256_loadu_pd(times + i), end);
        return abs_pd(_mm256_sub_pd(_mm256_loadu_pd(walk + i), chord));
      },
      [=](std::size_t i) { return std::fabs(walk[i] - times[i] * terminal); });
}

}  // namespace cumcal::kernels::avx2

#endif
