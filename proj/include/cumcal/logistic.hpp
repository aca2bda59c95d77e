#pragma once

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares (Newton-Raphson on the Bernoulli log-likelihood), with step
// halving whenever a full step increases the deviance.

#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace cumcal {

struct LogisticFitOptions {
  int max_iterations = 50;
  double score_tolerance = 1e-8;        // max |X'(y - mu)|
  double deviance_tolerance = 1e-12;    // relative change between iterations
  double divergence_bound = 50.0;       // |coefficient| above this flags separation
  // Either stopping rule also needs the Newton step below this (relative to
  // 1 + max |beta|). Under separation the score and deviance vanish while
  // the step stays O(1), so the fit keeps going until divergence_bound.
  double step_tolerance = 1e-6;
  int max_halvings = 30;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;  // from the inverse observed information
  double deviance = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Fits logit P(y = 1) = offset + X beta, starting from `start`.
/// Non-convergence (including separation) is reported in the result, not thrown.
LogisticFit fit_logistic(const Eigen::MatrixXd& design, std::span<const std::uint8_t> outcomes,
                         const Eigen::VectorXd& start, const LogisticFitOptions& options = {},
                         const Eigen::VectorXd* offset = nullptr);

/// -2 sum [y log mu + (1 - y) log(1 - mu)] with mu = expit(eta), computed
/// from the linear predictor to stay finite for extreme eta.
double bernoulli_deviance_from_logits(const Eigen::VectorXd& eta,
                                      std::span<const std::uint8_t> outcomes);

double logit(double p);
double expit(double x);

}  // namespace cumcal
