#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cumcal/calibration_tests.hpp"
#include "cumcal/logistic.hpp"
#include "cumcal/sim.hpp"

using namespace cumcal;

TEST_CASE("logit and expit") {
  CHECK(logit(0.5) == 0.0);
  CHECK(expit(0.0) == 0.5);
  for (const double x : {-700.0, -30.0, -1.0, 0.3, 30.0, 700.0}) {
    const double p = expit(x);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    if (std::abs(x) < 30) {
      CHECK(logit(p) == doctest::Approx(x).epsilon(1e-12));
    }
  }
  CHECK(expit(-800.0) == 0.0);
  CHECK(expit(800.0) == 1.0);
}

TEST_CASE("deviance from logits stays finite at extreme predictors") {
  Eigen::VectorXd eta(3);
  eta << -800.0, 0.0, 800.0;
  const std::vector<std::uint8_t> y{0, 1, 1};
  CHECK(bernoulli_deviance_from_logits(eta, y) == doctest::Approx(2.0 * std::log(2.0)));
  const std::vector<std::uint8_t> wrong{1, 1, 0};
  const double d = bernoulli_deviance_from_logits(eta, wrong);
  CHECK(std::isfinite(d));
  CHECK(d == doctest::Approx(2.0 * (800.0 + std::log(2.0) + 800.0)));
}

TEST_CASE("recalibration parameters are recovered on a large sample") {
  SimulationScenario s;
  s.family = ScenarioFamily::LogitLinear;
  s.a = 0.25;
  s.b = 2.0;
  s.n = 100000;
  s.seed = 42;
  const CalibrationDataset data = generate_dataset(s, 0);
  const RecalibrationFit fit = fit_logistic_recalibration(data);
  REQUIRE(fit.converged);
  // logit(pi) = 0.25 + 2 logit(p)  <=>  logit(p) = -0.125 + 0.5 logit(pi)
  MESSAGE("intercept " << fit.intercept << " +- " << fit.intercept_se << ", slope " << fit.slope
                       << " +- " << fit.slope_se);
  CHECK(std::abs(fit.intercept + 0.125) < 3.0 * fit.intercept_se);
  CHECK(std::abs(fit.slope - 0.5) < 3.0 * fit.slope_se);
  CHECK(fit.iterations <= 10);
}

TEST_CASE("general fitter agrees with a hand-rolled Newton iteration") {
  std::mt19937_64 engine(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int n = 500;
  Eigen::MatrixXd x(n, 3);
  std::vector<std::uint8_t> y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = normal(engine);
    x(i, 2) = normal(engine);
    y[i] = uniform(engine) < expit(-0.5 + 0.8 * x(i, 1) - 0.3 * x(i, 2));
  }
  const LogisticFit fit = fit_logistic(x, y, Eigen::Vector3d::Zero());
  REQUIRE(fit.converged);

  // Plain Newton from zero, 25 iterations, no safeguards.
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  for (int it = 0; it < 25; ++it) {
    Eigen::VectorXd mu(n);
    Eigen::VectorXd w(n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      mu[i] = 1.0 / (1.0 + std::exp(-x.row(i).dot(beta)));
      w[i] = mu[i] * (1 - mu[i]);
      r[i] = y[i] - mu[i];
    }
    const Eigen::Matrix3d info = x.transpose() * w.asDiagonal() * x;
    beta += info.inverse() * (x.transpose() * r);
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(fit.coefficients[k] == doctest::Approx(beta[k]).epsilon(1e-8));
  }
}

TEST_CASE("offsets shift the linear predictor") {
  const int n = 200;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd offset(n);
  std::vector<std::uint8_t> y(n);
  for (int i = 0; i < n; ++i) {
    offset[i] = 0.01 * (i - 100);
    y[i] = i % 3 == 0;
  }
  const LogisticFit with = fit_logistic(x, y, Eigen::VectorXd::Zero(1), {}, &offset);
  REQUIRE(with.converged);
  // Score equation: sum(y - expit(b + offset)) = 0.
  double score = 0.0;
  for (int i = 0; i < n; ++i) {
    score += y[i] - expit(with.coefficients[0] + offset[i]);
  }
  CHECK(std::abs(score) < 1e-7);
}

TEST_CASE("separation and constant outcomes are flagged, not thrown") {
  SUBCASE("all outcomes zero") {
    const CalibrationDataset data =
        build_dataset(std::vector<double>{0.1, 0.4, 0.6, 0.8}, std::vector<int>{0, 0, 0, 0});
    const RecalibrationFit fit = fit_logistic_recalibration(data);
    CHECK_FALSE(fit.converged);
  }
  SUBCASE("complete separation") {
    const CalibrationDataset data = build_dataset(std::vector<double>{0.1, 0.2, 0.3, 0.7, 0.8, 0.9},
                                                  std::vector<int>{0, 0, 0, 1, 1, 1});
    const RecalibrationFit fit = fit_logistic_recalibration(data);
    CHECK_FALSE(fit.converged);
    const WeakCalibResult r = weak_calibration_lr_test(data);
    CHECK_FALSE(r.p_value.has_value());
  }
  SUBCASE("dimension mismatch is a usage error") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 2);
    const std::vector<std::uint8_t> y{0, 1};
    CHECK_THROWS_AS(fit_logistic(x, y, Eigen::Vector2d::Zero()), std::invalid_argument);
  }
}

TEST_CASE("LR statistic is nonnegative") {
  for (std::uint64_t r = 0; r < 200; ++r) {
    SimulationScenario s;
    s.family = r % 2 ? ScenarioFamily::LogitLinear : ScenarioFamily::Null;
    s.a = 0.1;
    s.b = 1.2;
    s.n = 60 + r;
    s.seed = 3;
    const WeakCalibResult w = weak_calibration_lr_test(generate_dataset(s, r));
    if (w.converged) {
      CHECK(w.lr_statistic >= -1e-8);
      CHECK(*w.p_value >= 0.0);
      CHECK(*w.p_value <= 1.0);
    }
  }
}
