#pragma once

// Synthetic two-model validation exercise: a logistic risk model fitted on
// a large development sample and on a 500-observation subset of it, both
// evaluated on an independent validation sample from the same population.
// The population mimics an acute-MI cohort (age, infarct location, prior
// MI, Killip class, capped systolic pressure, heart rate) with a known
// logistic truth.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cumcal/core.hpp"

namespace cumcal {

struct CaseStudyConfig {
  std::size_t development = 17796;
  std::size_t small_development = 500;
  std::size_t validation = 23034;
  std::uint64_t seed = 1;
};

struct CaseStudyModel {
  std::string name;
  std::size_t development_size = 0;
  std::vector<double> coefficients;  // intercept first, covariate order as kCaseStudyCovariates
  bool converged = false;
  CalibrationDataset validation;     // model predictions against validation outcomes
  double c_statistic = 0.0;
};

struct CaseStudyResult {
  CaseStudyConfig config;
  std::vector<double> true_coefficients;
  double development_event_rate = 0.0;
  double small_development_event_rate = 0.0;
  double validation_event_rate = 0.0;
  CaseStudyModel full;
  CaseStudyModel small;
  CalibrationDataset reference;  // true risks against the validation outcomes
};

inline const std::vector<std::string> kCaseStudyCovariates = {
    "age", "location_other", "location_anterior", "previous_mi", "killip", "min_sbp_100",
    "heart_rate"};

CaseStudyResult run_case_study(const CaseStudyConfig& config);

/// Probability that a random event has a higher prediction than a random
/// non-event (ties count one half).
double c_statistic(const CalibrationDataset& data);

}  // namespace cumcal
