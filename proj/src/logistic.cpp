#include "cumcal/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cumcal {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& design, const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd* offset) {
  Eigen::VectorXd eta = design * beta;
  if (offset != nullptr) {
    eta += *offset;
  }
  return eta;
}

}  // namespace

double logit(double p) {
  return std::log(p) - std::log1p(-p);
}

double expit(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bernoulli_deviance_from_logits(const Eigen::VectorXd& eta,
                                      std::span<const std::uint8_t> outcomes) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    sum += outcomes[static_cast<std::size_t>(i)] ? softplus(-eta[i]) : softplus(eta[i]);
  }
  return 2.0 * sum;
}

LogisticFit fit_logistic(const Eigen::MatrixXd& design, std::span<const std::uint8_t> outcomes,
                         const Eigen::VectorXd& start, const LogisticFitOptions& options,
                         const Eigen::VectorXd* offset) {
  const Eigen::Index n = design.rows();
  if (static_cast<std::size_t>(n) != outcomes.size() || start.size() != design.cols() ||
      (offset != nullptr && offset->size() != n)) {
    throw std::invalid_argument("fit_logistic: inconsistent dimensions");
  }

  LogisticFit fit;
  fit.coefficients = start;
  Eigen::VectorXd eta = linear_predictor(design, fit.coefficients, offset);
  fit.deviance = bernoulli_deviance_from_logits(eta, outcomes);

  const auto events = std::count(outcomes.begin(), outcomes.end(), 1);
  if (events == 0 || events == n) {
    fit.standard_errors = Eigen::VectorXd::Constant(start.size(), std::nan(""));
    return fit;
  }

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = outcomes[static_cast<std::size_t>(i)];
  }

  auto information = [&](const Eigen::VectorXd& mu) {
    const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
    return Eigen::MatrixXd(design.transpose() * w.asDiagonal() * design);
  };
  auto fitted = [](const Eigen::VectorXd& linear) {
    return Eigen::VectorXd(linear.unaryExpr([](double v) { return expit(v); }));
  };

  bool stalled = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd mu = fitted(eta);
    const Eigen::VectorXd score = design.transpose() * (y - mu);
    const Eigen::VectorXd delta = information(mu).ldlt().solve(score);
    const bool small_step = delta.cwiseAbs().maxCoeff() <=
                            options.step_tolerance * (1.0 + fit.coefficients.cwiseAbs().maxCoeff());
    if (score.cwiseAbs().maxCoeff() < options.score_tolerance && small_step) {
      fit.converged = true;
      break;
    }

    double step = 1.0;
    Eigen::VectorXd candidate = fit.coefficients + delta;
    Eigen::VectorXd candidate_eta = linear_predictor(design, candidate, offset);
    double candidate_deviance = bernoulli_deviance_from_logits(candidate_eta, outcomes);
    int halvings = 0;
    while (!(candidate_deviance <= fit.deviance) && halvings < options.max_halvings) {
      step *= 0.5;
      candidate = fit.coefficients + step * delta;
      candidate_eta = linear_predictor(design, candidate, offset);
      candidate_deviance = bernoulli_deviance_from_logits(candidate_eta, outcomes);
      ++halvings;
    }
    if (!(candidate_deviance <= fit.deviance)) {
      // No representable improvement: the optimum if the step is negligible.
      fit.converged = small_step;
      stalled = !small_step;
      break;
    }

    const double change =
        std::abs(fit.deviance - candidate_deviance) / (std::abs(candidate_deviance) + 0.1);
    fit.coefficients = candidate;
    eta = candidate_eta;
    fit.deviance = candidate_deviance;
    fit.iterations = it;

    if (fit.coefficients.cwiseAbs().maxCoeff() > options.divergence_bound) {
      break;
    }
    if (change < options.deviance_tolerance && small_step) {
      fit.converged = true;
      break;
    }
  }

  if (stalled || fit.coefficients.cwiseAbs().maxCoeff() > options.divergence_bound) {
    fit.converged = false;
  }
  const Eigen::MatrixXd covariance =
      information(fitted(eta)).ldlt().solve(Eigen::MatrixXd::Identity(start.size(), start.size()));
  fit.standard_errors = covariance.diagonal().cwiseSqrt();
  return fit;
}

}  // namespace cumcal
