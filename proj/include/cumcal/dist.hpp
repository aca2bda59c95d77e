#pragma once

// Null distributions used by the partial-sum tests.
//
// F   sup of |W(t)| over [0,1] for standard Brownian motion W
// G   sup of |B(t)| over [0,1] for a standard Brownian bridge B (Kolmogorov)
// H   sup of |W(t)| given W(1) = b
//
// Each series has two algebraically equivalent forms: a "theta" form whose
// terms decay like exp(-c / a^2), accurate for small a, and a form whose
// terms decay like exp(-c a^2), accurate for large a. The public functions
// switch at a = 1. Both forms are exposed so they can be cross-checked.

#include <stdexcept>

namespace cumcal {

/// Truncation policy for the series evaluations.
struct SeriesConfig {
  double term_tolerance = 1e-16;
  int max_terms = 200;

  void validate() const {
    if (!(term_tolerance > 0.0) || max_terms < 1) {
      throw std::invalid_argument("invalid series configuration");
    }
  }
};

/// Below this argument F, G and H return 0: every series term underflows.
inline constexpr double kSeriesFloor = 0.05;

double sup_abs_bm_cdf(double a, const SeriesConfig& config = {});
/// 1 - F(a), evaluated without cancellation for large a.
double sup_abs_bm_sf(double a, const SeriesConfig& config = {});
/// F via (4/pi) sum (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 / (8 a^2)).
double sup_abs_bm_cdf_theta(double a, const SeriesConfig& config = {});
/// 1 - F via 4 sum_{k>=1} (-1)^{k+1} Phi(-(2k-1) a).
double sup_abs_bm_sf_reflection(double a, const SeriesConfig& config = {});

double kolmogorov_cdf(double a, const SeriesConfig& config = {});
double kolmogorov_sf(double a, const SeriesConfig& config = {});
/// G via sum_{k in Z} (-1)^k exp(-2 a^2 k^2).
double kolmogorov_cdf_alternating(double a, const SeriesConfig& config = {});
/// G via (sqrt(2 pi)/a) sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 a^2)).
double kolmogorov_cdf_theta(double a, const SeriesConfig& config = {});
/// log(1 - G(a)); finite even where 1 - G(a) underflows.
double log_kolmogorov_sf(double a);

/// P(sup |W| < a | W(1) = b). Zero whenever a <= |b|.
double conditional_sup_cdf(double a, double b, const SeriesConfig& config = {});
/// Direct form: sum_{|k|<=50} (-1)^k exp(2abk - 2a^2k^2).
double conditional_sup_cdf_direct(double a, double b, const SeriesConfig& config = {});
/// Poisson-summation dual of the direct form:
/// (sqrt(2 pi)/a) e^{b^2/2} sum_{j>=0} exp(-(2j+1)^2 pi^2/(8a^2)) cos((2j+1) pi b/(2a)).
double conditional_sup_cdf_theta(double a, double b, const SeriesConfig& config = {});

double std_normal_cdf(double x);
/// Inverse of std_normal_cdf for p in (0,1).
double std_normal_quantile(double p);
/// log(2 Phi(-|z|)), the log of a two-sided normal p-value; finite for any finite z.
double log_two_sided_normal_p(double z);

/// exp(-x/2)(1 + x/2).
double chi_square4_sf(double x);
/// Upper tail of chi-square with `df` degrees of freedom. Even df uses the
/// finite Poisson sum, odd df the regularized incomplete gamma function.
double chi_square_sf(double x, int df);

/// Fisher's combination of two independent p-values, evaluated in log
/// space: p-values that underflowed to zero still give a defined result.
double fisher_combine(double log_p_a, double log_p_b);
double fisher_combine_p(double p_a, double p_b);

enum class SupDistribution { SupAbsBM, Kolmogorov };

/// The `level` quantile of F or G, by bisection on [1e-6, 10].
double critical_value(SupDistribution distribution, double level);

}  // namespace cumcal
