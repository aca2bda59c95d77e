#pragma once

// Monte Carlo studies of the calibration tests.
//
// Null:        logit(p) = beta0 + X; predictions equal the true risk.
// LogitLinear: true risk expit(X), prediction logit = a + b X.
// LogitPower:  true risk expit(X), prediction logit = a + b sign(X) |X|^(1/b).
//
// X ~ Normal(0, 1) is drawn once per observation and shared by the true
// risk and the prediction. Every replicate draws from its own stream keyed
// by (root seed, family, beta0, a, b, n, replicate index).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cumcal/core.hpp"

namespace cumcal {

enum class ScenarioFamily { Null, LogitLinear, LogitPower };

std::string_view family_name(ScenarioFamily family) noexcept;
std::optional<ScenarioFamily> parse_family(std::string_view name) noexcept;

struct SimulationScenario {
  ScenarioFamily family = ScenarioFamily::Null;
  double beta0 = 0.0;
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 1000;
  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;

  void validate() const;
  friend bool operator==(const SimulationScenario&, const SimulationScenario&) = default;
};

/// One replicate in generation order, before sorting.
struct RawSample {
  std::vector<double> covariate;  // X
  std::vector<double> true_risk;
  std::vector<double> predictions;
  std::vector<std::uint8_t> outcomes;
};

RawSample generate_raw(const SimulationScenario& scenario, std::uint64_t replicate);
CalibrationDataset generate_dataset(const SimulationScenario& scenario, std::uint64_t replicate);

enum class TestKind { LR, HL, BM, BB, BridgeMean, BridgeShape };
inline constexpr std::array<TestKind, 6> kAllTestKinds = {
    TestKind::LR, TestKind::HL, TestKind::BM, TestKind::BB, TestKind::BridgeMean,
    TestKind::BridgeShape};

std::string_view test_name(TestKind kind) noexcept;
std::optional<TestKind> parse_test_name(std::string_view name) noexcept;

struct TestTally {
  TestKind kind = TestKind::BM;
  std::size_t rejections = 0;
  std::vector<double> pvalues;  // empty unless p-values were kept

  friend bool operator==(const TestTally&, const TestTally&) = default;
};

struct SimulationSummary {
  SimulationScenario scenario;
  std::vector<TestTally> tallies;
  std::size_t lr_nonconverged = 0;
  std::size_t hl_degenerate = 0;
  double wall_seconds = 0.0;

  const TestTally* find(TestKind kind) const noexcept;
  double rejection(TestKind kind) const;
  /// sqrt(p (1 - p) / replications)
  double standard_error(TestKind kind) const;

  /// Equality of everything except wall time.
  bool same_results(const SimulationSummary& other) const;
};

struct StudyOptions {
  bool keep_pvalues = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Runs `tests` on every replicate of one scenario. Replicates whose LR fit
/// does not converge, or whose HL table is degenerate, count as
/// non-rejections for that test and are tallied in the diagnostics.
SimulationSummary run_cell(const SimulationScenario& scenario, std::span<const TestKind> tests,
                           const StudyOptions& options = {});

enum class StudyKind { Null, Power };

struct StudyResult {
  StudyKind kind = StudyKind::Null;
  ScenarioFamily family = ScenarioFamily::Null;
  std::vector<double> beta0_grid;  // null study
  std::vector<double> a_grid;      // power study
  std::vector<double> b_grid;      // power study
  std::vector<std::size_t> n_grid;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::vector<SimulationSummary> cells;  // row-major over the grids as listed
};

/// BM and BB (with its two components) on every (beta0, n) cell; cells
/// ordered n-major, beta0-minor.
StudyResult run_null_study(std::span<const double> beta0_grid, std::span<const std::size_t> n_grid,
                           std::size_t replications, std::uint64_t seed, double alpha = 0.05,
                           const StudyOptions& options = {});

/// LR, HL (deciles, 10 df), BM and BB on every (n, b, a) cell; ordered n-major,
/// then b, then a.
StudyResult run_power_study(ScenarioFamily family, std::span<const double> a_grid,
                            std::span<const double> b_grid, std::span<const std::size_t> n_grid,
                            std::size_t replications, std::uint64_t seed, double alpha = 0.05,
                            const StudyOptions& options = {});

/// Right-continuous empirical CDF sampled at `points` equally spaced values
/// 0, 1/(points-1), ..., 1.
std::vector<double> pvalue_ecdf(std::span<const double> pvalues, std::size_t points = 512);

/// Exact sup |ECDF(x) - x| over [0, 1] for a sample of p-values.
double ecdf_uniform_deviation(std::span<const double> pvalues);

}  // namespace cumcal
