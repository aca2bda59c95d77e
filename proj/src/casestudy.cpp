#include "cumcal/casestudy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cumcal/logistic.hpp"
#include "cumcal/rng.hpp"

namespace cumcal {

namespace {

constexpr std::uint64_t kCaseStudyStream = 0x6361736573747564ULL;

// Population truth, per covariate in kCaseStudyCovariates order.
const std::vector<double> kTruth = {-2.084, 0.078, 0.403, 0.577, 0.468, 0.767, -0.077, 0.018};

struct Cohort {
  Eigen::MatrixXd design;  // leading column of ones
  std::vector<std::uint8_t> outcomes;
};

Cohort draw_cohort(std::size_t n, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::Map<const Eigen::VectorXd> truth(kTruth.data(),
                                                static_cast<Eigen::Index>(kTruth.size()));

  Cohort cohort{Eigen::MatrixXd(static_cast<Eigen::Index>(n), 8), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double age = std::clamp(61.0 + 11.0 * normal(engine), 20.0, 95.0);
    const double location = uniform(engine);
    const double previous_mi = uniform(engine) < 0.17 ? 1.0 : 0.0;
    const double k = uniform(engine);
    const double killip = k < 0.86 ? 1.0 : k < 0.98 ? 2.0 : k < 0.995 ? 3.0 : 4.0;
    const double sbp = std::min(130.0 + 24.0 * normal(engine), 100.0);
    const double heart_rate = std::max(76.0 + 18.0 * normal(engine), 35.0);

    cohort.design.row(row) << 1.0, age, location < 0.03 ? 1.0 : 0.0,
        (location >= 0.03 && location < 0.42) ? 1.0 : 0.0, previous_mi, killip, sbp, heart_rate;
    const double risk = expit(cohort.design.row(row).dot(truth));
    cohort.outcomes[i] = uniform(engine) < risk ? 1 : 0;
  }
  return cohort;
}

double event_rate(std::span<const std::uint8_t> y) {
  return static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(y.size());
}

CaseStudyModel fit_and_validate(std::string name, const Eigen::MatrixXd& design,
                                std::span<const std::uint8_t> outcomes, const Cohort& validation) {
  Eigen::VectorXd start = Eigen::VectorXd::Zero(design.cols());
  const LogisticFit fit = fit_logistic(design, outcomes, start);

  const Eigen::VectorXd eta = validation.design * fit.coefficients;
  std::vector<double> predictions(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    predictions[static_cast<std::size_t>(i)] = expit(eta[i]);
  }
  CalibrationDataset scored = build_dataset(predictions, validation.outcomes, 1e-12);
  const double c = c_statistic(scored);
  return CaseStudyModel{std::move(name),
                        static_cast<std::size_t>(design.rows()),
                        {fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size()},
                        fit.converged,
                        std::move(scored),
                        c};
}

}  // namespace

double c_statistic(const CalibrationDataset& data) {
  // Predictions are sorted; walk tie blocks and count events below each non-event.
  const auto p = data.predictions();
  const auto y = data.outcomes();
  const std::size_t events = data.event_count();
  const std::size_t non_events = data.size() - events;
  if (events == 0 || non_events == 0) {
    throw std::invalid_argument("c_statistic needs both events and non-events");
  }
  double concordant = 0.0;
  std::size_t non_events_below = 0;
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    std::size_t block_events = 0;
    std::size_t block_non_events = 0;
    while (j < p.size() && p[j] == p[i]) {
      (y[j] ? block_events : block_non_events)++;
      ++j;
    }
    concordant += static_cast<double>(block_events) *
                  (static_cast<double>(non_events_below) + 0.5 * static_cast<double>(block_non_events));
    non_events_below += block_non_events;
    i = j;
  }
  return concordant / (static_cast<double>(events) * static_cast<double>(non_events));
}

CaseStudyResult run_case_study(const CaseStudyConfig& config) {
  if (config.small_development < 10 || config.small_development > config.development ||
      config.validation < 10) {
    throw std::invalid_argument("case study: inconsistent sample sizes");
  }
  Engine engine = make_engine(config.seed, {kCaseStudyStream});
  const Cohort development = draw_cohort(config.development, engine);
  const Cohort validation = draw_cohort(config.validation, engine);

  const auto small_rows = static_cast<Eigen::Index>(config.small_development);
  const std::span<const std::uint8_t> small_outcomes(development.outcomes.data(),
                                                     config.small_development);

  CaseStudyModel full =
      fit_and_validate("full", development.design, development.outcomes, validation);
  CaseStudyModel small = fit_and_validate("small", development.design.topRows(small_rows),
                                          small_outcomes, validation);
  const Eigen::VectorXd true_eta =
      validation.design *
      Eigen::Map<const Eigen::VectorXd>(kTruth.data(), static_cast<Eigen::Index>(kTruth.size()));
  std::vector<double> true_risk(static_cast<std::size_t>(true_eta.size()));
  for (Eigen::Index i = 0; i < true_eta.size(); ++i) {
    true_risk[static_cast<std::size_t>(i)] = expit(true_eta[i]);
  }
  return CaseStudyResult{config,
                         kTruth,
                         event_rate(development.outcomes),
                         event_rate(small_outcomes),
                         event_rate(validation.outcomes),
                         std::move(full),
                         std::move(small),
                         build_dataset(true_risk, validation.outcomes, 1e-12)};
}

}  // namespace cumcal
