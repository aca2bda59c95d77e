#pragma once

// Validated (prediction, outcome) data and the standardized cumulative
// prediction-error walk built from it.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cumcal {

/// Malformed input data: length mismatch, prediction outside (0,1),
/// non-binary outcome, empty input.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Predicted risks in (0,1) sorted ascending, with their binary outcomes
/// permuted by the same (stable) sort. Immutable; copies share storage.
class CalibrationDataset {
 public:
  std::span<const double> predictions() const noexcept { return data_->predictions; }
  std::span<const std::uint8_t> outcomes() const noexcept { return data_->outcomes; }
  std::size_t size() const noexcept { return data_->predictions.size(); }

  /// True when two or more predictions are equal. The walk then depends on
  /// the within-tie order, which is the input order.
  bool has_ties() const noexcept { return data_->has_ties; }

  std::size_t event_count() const noexcept;
  double mean_prediction() const noexcept;

  /// Same predictions, different outcome vector (must be binary and of equal length).
  CalibrationDataset with_outcomes(std::vector<std::uint8_t> outcomes) const;

 private:
  struct Storage {
    std::vector<double> predictions;
    std::vector<std::uint8_t> outcomes;
    bool has_ties = false;
  };

  explicit CalibrationDataset(std::shared_ptr<const Storage> data) : data_(std::move(data)) {}

  friend CalibrationDataset make_sorted_dataset(std::vector<double>, std::vector<std::uint8_t>);

  std::shared_ptr<const Storage> data_;
};

/// Validates and co-sorts raw predictions and outcomes.
///
/// With `clamp_epsilon` set, predictions are first clipped into
/// [clamp_epsilon, 1 - clamp_epsilon]; otherwise any prediction outside the
/// open interval (0,1) is rejected.
CalibrationDataset build_dataset(std::span<const double> predictions, std::span<const int> outcomes,
                                 std::optional<double> clamp_epsilon = std::nullopt);
CalibrationDataset build_dataset(std::span<const double> predictions,
                                 std::span<const std::uint8_t> outcomes,
                                 std::optional<double> clamp_epsilon = std::nullopt);

/// The random walk {(t_i, S_i)} with raw partial sums C_i. Index i here is
/// zero-based and corresponds to the walk after i+1 observations; the
/// origin (0, 0) is implicit.
struct CumulativeProcess {
  CalibrationDataset source;
  double total_variance = 0.0;  // T = sum p(1-p)
  std::vector<double> times;    // t_i, strictly increasing, last == 1
  std::vector<double> walk;     // S_i = sum (y - p) / sqrt(T)
  std::vector<double> raw_sums; // C_i = sum (y - p) / n

  std::size_t size() const noexcept { return walk.size(); }
};

CumulativeProcess cumulative_process(const CalibrationDataset& data);

/// Position of an extremum of the walk, in index, time and prediction coordinates.
struct WalkLocation {
  std::size_t index = 0;
  double time = 0.0;
  double prediction = 0.0;
};

struct WalkStatistics {
  double c_star = 0.0;  // max |C_i|
  double s_star = 0.0;  // max |S_i|
  double s_n = 0.0;     // terminal walk value
  double c_n = 0.0;     // mean calibration error
  double b_star = 0.0;  // max |S_i - t_i S_n|
  WalkLocation argmax_bm;
  WalkLocation argmax_bb;
};

/// Maxima use the smallest index attaining them.
WalkStatistics walk_statistics(const CumulativeProcess& process);

/// The three null-distribution statistics of a walk, computed exactly as
/// walk_statistics does. Used by the resampling tests.
struct WalkSummary {
  double s_star = 0.0;
  double b_star = 0.0;
  double s_n = 0.0;
};

/// Recomputes the walk for an alternative outcome vector against fixed
/// predictions and time grid. `errors` and `walk` are caller-provided
/// scratch of length n.
WalkSummary summarize_outcomes(std::span<const double> predictions,
                               std::span<const std::uint8_t> outcomes,
                               std::span<const double> times, double sqrt_total_variance,
                               std::span<double> errors, std::span<double> walk);

/// Total variance below which the asymptotic null distributions are not trusted.
inline constexpr double kSmallSampleVariance = 30.0;

}  // namespace cumcal
