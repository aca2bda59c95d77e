#include "cumcal/kernels.hpp"

#include <cmath>

namespace cumcal::kernels::scalar {

void prediction_terms(const double* p, const std::uint8_t* y, std::size_t n, double* variance,
                      double* error) {
  for (std::size_t i = 0; i < n; ++i) {
    variance[i] = p[i] * (1.0 - p[i]);
    error[i] = static_cast<double>(y[i]) - p[i];
  }
}

void prediction_errors(const double* p, const std::uint8_t* y, std::size_t n, double* error) {
  for (std::size_t i = 0; i < n; ++i) {
    error[i] = static_cast<double>(y[i]) - p[i];
  }
}

Extremum max_abs(const double* v, std::size_t n) {
  Extremum best;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(v[i]);
    if (a > best.value || i == 0) {
      best = {i, a};
    }
  }
  return best;
}

Extremum bridged_max_abs(const double* walk, const double* times, std::size_t n, double terminal) {
  Extremum best;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(walk[i] - times[i] * terminal);
    if (a > best.value || i == 0) {
      best = {i, a};
    }
  }
  return best;
}

}  // namespace cumcal::kernels::scalar
