#include "cumcal/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace cumcal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCrossover = 1.0;

void require_nonnegative(double a, const char* what) {
  if (!(a >= 0.0)) {
    throw std::invalid_argument(std::string(what) + ": argument must be nonnegative");
  }
}

double clamp01(double p) {
  return std::clamp(p, 0.0, 1.0);
}

double normal_lower_tail(double x) {
  // Phi(-x)
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace

// --- sup |W| ----------------------------------------------------------------

double sup_abs_bm_cdf_theta(double a, const SeriesConfig& config) {
  require_nonnegative(a, "sup_abs_bm_cdf");
  config.validate();
  if (a < kSeriesFloor) {
    return 0.0;
  }
  const double scale = kPi * kPi / (8.0 * a * a);
  double sum = 0.0;
  for (int k = 0; k < config.max_terms; ++k) {
    const double odd = 2.0 * k + 1.0;
    const double term = std::exp(-odd * odd * scale) / odd;
    sum += (k % 2 == 0) ? term : -term;
    if (term < config.term_tolerance) {
      break;
    }
  }
  return clamp01(4.0 / kPi * sum);
}

double sup_abs_bm_sf_reflection(double a, const SeriesConfig& config) {
  require_nonnegative(a, "sup_abs_bm_sf");
  config.validate();
  double sum = 0.0;
  for (int k = 1; k <= config.max_terms; ++k) {
    const double term = normal_lower_tail((2.0 * k - 1.0) * a);
    sum += (k % 2 == 1) ? term : -term;
    if (term <= config.term_tolerance * std::abs(sum)) {
      break;
    }
  }
  return clamp01(4.0 * sum);
}

double sup_abs_bm_cdf(double a, const SeriesConfig& config) {
  if (a < kCrossover) {
    return sup_abs_bm_cdf_theta(a, config);
  }
  return clamp01(1.0 - sup_abs_bm_sf_reflection(a, config));
}

double sup_abs_bm_sf(double a, const SeriesConfig& config) {
  if (a < kCrossover) {
    return clamp01(1.0 - sup_abs_bm_cdf_theta(a, config));
  }
  return sup_abs_bm_sf_reflection(a, config);
}

// --- Kolmogorov -------------------------------------------------------------

namespace {

// sum_{k>=1} (-1)^{k-1} exp(-2 k^2 a^2), so that 1 - G = 2 * this.
double kolmogorov_tail_sum(double a, const SeriesConfig& config) {
  double sum = 0.0;
  for (int k = 1; k <= config.max_terms; ++k) {
    const double term = std::exp(-2.0 * a * a * k * k);
    sum += (k % 2 == 1) ? term : -term;
    if (term < config.term_tolerance) {
      break;
    }
  }
  return sum;
}

// sum_{j>=0} exp(-(2j+1)^2 pi^2 / (8a^2)) cos((2j+1) pi b / (2a)); b = 0 gives
// the Kolmogorov theta series.
double theta_sum(double a, double b, const SeriesConfig& config) {
  const double scale = kPi * kPi / (8.0 * a * a);
  double sum = 0.0;
  for (int j = 0; j < config.max_terms; ++j) {
    const double odd = 2.0 * j + 1.0;
    const double envelope = std::exp(-odd * odd * scale);
    sum += (b == 0.0) ? envelope : envelope * std::cos(odd * kPi * b / (2.0 * a));
    if (envelope < config.term_tolerance) {
      break;
    }
  }
  return sum;
}

}  // namespace

double kolmogorov_cdf_alternating(double a, const SeriesConfig& config) {
  require_nonnegative(a, "kolmogorov_cdf");
  config.validate();
  if (a < kSeriesFloor) {
    return 0.0;
  }
  return clamp01(1.0 - 2.0 * kolmogorov_tail_sum(a, config));
}

double kolmogorov_cdf_theta(double a, const SeriesConfig& config) {
  require_nonnegative(a, "kolmogorov_cdf");
  config.validate();
  if (a < kSeriesFloor) {
    return 0.0;
  }
  return clamp01(std::sqrt(2.0 * kPi) / a * theta_sum(a, 0.0, config));
}

double kolmogorov_cdf(double a, const SeriesConfig& config) {
  return a < kCrossover ? kolmogorov_cdf_theta(a, config) : kolmogorov_cdf_alternating(a, config);
}

double kolmogorov_sf(double a, const SeriesConfig& config) {
  if (a < kCrossover) {
    return clamp01(1.0 - kolmogorov_cdf_theta(a, config));
  }
  return clamp01(2.0 * kolmogorov_tail_sum(a, config));
}

double log_kolmogorov_sf(double a) {
  require_nonnegative(a, "log_kolmogorov_sf");
  if (a < kCrossover) {
    return std::log(kolmogorov_sf(a));
  }
  // 1 - G = 2 e^{-2a^2} sum_{k>=1} (-1)^{k-1} e^{-2(k^2-1)a^2}
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * a * a * (static_cast<double>(k) * k - 1.0));
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) {
      break;
    }
  }
  return std::log(2.0) - 2.0 * a * a + std::log(sum);
}

// --- sup |W| given W(1) = b ---------------------------------------------------

double conditional_sup_cdf_direct(double a, double b, const SeriesConfig& config) {
  require_nonnegative(a, "conditional_sup_cdf");
  config.validate();
  if (a <= std::abs(b) || a < kSeriesFloor) {
    return 0.0;
  }
  constexpr int kMaxOrder = 50;
  double sum = 1.0;
  for (int k = 1; k <= kMaxOrder; ++k) {
    const double up = std::exp(2.0 * a * k * (b - a * k));
    const double down = std::exp(-2.0 * a * k * (b + a * k));
    sum += (k % 2 == 0) ? (up + down) : -(up + down);
    if (up + down < config.term_tolerance) {
      break;
    }
  }
  return clamp01(sum);
}

double conditional_sup_cdf_theta(double a, double b, const SeriesConfig& config) {
  require_nonnegative(a, "conditional_sup_cdf");
  config.validate();
  if (a <= std::abs(b) || a < kSeriesFloor) {
    return 0.0;
  }
  return clamp01(std::sqrt(2.0 * kPi) / a * std::exp(0.5 * b * b) * theta_sum(a, b, config));
}

double conditional_sup_cdf(double a, double b, const SeriesConfig& config) {
  return a < kCrossover ? conditional_sup_cdf_theta(a, b, config)
                        : conditional_sup_cdf_direct(a, b, config);
}

// --- normal and chi-square ----------------------------------------------------

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: p must lie in (0,1)");
  }
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double log_two_sided_normal_p(double z) {
  const double x = std::abs(z) / std::numbers::sqrt2;
  const double p = std::erfc(x);
  if (p > 1e-300) {
    return std::log(p);
  }
  // Asymptotic expansion of erfc for large x.
  const double inv = 1.0 / (x * x);
  const double series = 1.0 - 0.5 * inv + 0.75 * inv * inv - 1.875 * inv * inv * inv;
  return -x * x - std::log(x * std::sqrt(kPi)) + std::log(series);
}

double chi_square4_sf(double x) {
  require_nonnegative(x, "chi_square4_sf");
  if (std::isinf(x)) {
    return 0.0;
  }
  return clamp01(std::exp(-0.5 * x) * (1.0 + 0.5 * x));
}

double chi_square_sf(double x, int df) {
  if (df < 1) {
    throw std::invalid_argument("chi_square_sf: degrees of freedom must be positive");
  }
  require_nonnegative(x, "chi_square_sf");
  if (x == 0.0) {
    return 1.0;
  }
  if (std::isinf(x)) {
    return 0.0;
  }
  const double half = 0.5 * x;
  if (df % 2 == 0) {
    double sum = 0.0;
    const double log_half = std::log(half);
    for (int j = 0; j < df / 2; ++j) {
      sum += std::exp(-half + j * log_half - std::lgamma(j + 1.0));
    }
    return clamp01(sum);
  }
  return clamp01(boost::math::gamma_q(0.5 * df, half));
}

double fisher_combine(double log_p_a, double log_p_b) {
  const double x = -2.0 * (log_p_a + log_p_b);
  if (std::isnan(x)) {
    throw std::invalid_argument("fisher_combine: p-value logs must not be NaN");
  }
  if (std::isinf(x)) {
    return 0.0;
  }
  if (x <= 0.0) {
    return 1.0;
  }
  return clamp01(std::exp(-0.5 * x + std::log1p(0.5 * x)));
}

double fisher_combine_p(double p_a, double p_b) {
  auto log_p = [](double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("fisher_combine: p-values must lie in [0,1]");
    }
    return p == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(p);
  };
  return fisher_combine(log_p(p_a), log_p(p_b));
}

double critical_value(SupDistribution distribution, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("critical_value: level must lie in (0,1)");
  }
  auto cdf = [distribution](double a) {
    return distribution == SupDistribution::SupAbsBM ? sup_abs_bm_cdf(a) : kolmogorov_cdf(a);
  };
  double lo = 1e-6;
  double hi = 10.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cumcal
