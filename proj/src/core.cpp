#include "cumcal/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cumcal/kernels.hpp"

namespace cumcal {

CalibrationDataset make_sorted_dataset(std::vector<double> predictions,
                                       std::vector<std::uint8_t> outcomes) {
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return predictions[a] < predictions[b]; });

  auto storage = std::make_shared<CalibrationDataset::Storage>();
  storage->predictions.reserve(order.size());
  storage->outcomes.reserve(order.size());
  for (const std::size_t i : order) {
    storage->predictions.push_back(predictions[i]);
    storage->outcomes.push_back(outcomes[i]);
  }
  storage->has_ties =
      std::adjacent_find(storage->predictions.begin(), storage->predictions.end()) !=
      storage->predictions.end();
  return CalibrationDataset(std::move(storage));
}

namespace {

template <typename Outcome>
CalibrationDataset build(std::span<const double> predictions, std::span<const Outcome> outcomes,
                         std::optional<double> clamp_epsilon) {
  if (predictions.empty()) {
    throw DataError("empty input");
  }
  if (predictions.size() != outcomes.size()) {
    throw DataError("length mismatch: " + std::to_string(predictions.size()) +
                    " predictions, " + std::to_string(outcomes.size()) + " outcomes");
  }
  if (clamp_epsilon && !(*clamp_epsilon > 0.0 && *clamp_epsilon < 0.5)) {
    throw DataError("clamp epsilon must lie in (0, 0.5)");
  }

  std::vector<double> p(predictions.begin(), predictions.end());
  std::vector<std::uint8_t> y(outcomes.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (outcomes[i] != 0 && outcomes[i] != 1) {
      throw DataError("outcome not binary at position " + std::to_string(i));
    }
    y[i] = static_cast<std::uint8_t>(outcomes[i]);
    if (clamp_epsilon && !std::isnan(p[i])) {
      p[i] = std::clamp(p[i], *clamp_epsilon, 1.0 - *clamp_epsilon);
    }
    if (!(p[i] > 0.0 && p[i] < 1.0)) {
      throw DataError("prediction outside (0,1) at position " + std::to_string(i));
    }
  }
  return make_sorted_dataset(std::move(p), std::move(y));
}

}  // namespace

std::size_t CalibrationDataset::event_count() const noexcept {
  return static_cast<std::size_t>(std::count(data_->outcomes.begin(), data_->outcomes.end(), 1));
}

double CalibrationDataset::mean_prediction() const noexcept {
  return kernels::compensated_sum(data_->predictions) / static_cast<double>(size());
}

CalibrationDataset CalibrationDataset::with_outcomes(std::vector<std::uint8_t> outcomes) const {
  if (outcomes.size() != size()) {
    throw DataError("length mismatch in replacement outcomes");
  }
  if (std::any_of(outcomes.begin(), outcomes.end(), [](std::uint8_t v) { return v > 1; })) {
    throw DataError("outcome not binary");
  }
  auto storage = std::make_shared<Storage>(*data_);
  storage->outcomes = std::move(outcomes);
  return CalibrationDataset(std::move(storage));
}

CalibrationDataset build_dataset(std::span<const double> predictions, std::span<const int> outcomes,
                                 std::optional<double> clamp_epsilon) {
  return build(predictions, outcomes, clamp_epsilon);
}

CalibrationDataset build_dataset(std::span<const double> predictions,
                                 std::span<const std::uint8_t> outcomes,
                                 std::optional<double> clamp_epsilon) {
  return build(predictions, outcomes, clamp_epsilon);
}

CumulativeProcess cumulative_process(const CalibrationDataset& data) {
  const std::size_t n = data.size();
  CumulativeProcess proc{data, 0.0, std::vector<double>(n), std::vector<double>(n),
                         std::vector<double>(n)};

  std::vector<double> variance(n);
  std::vector<double> errors(n);
  kernels::prediction_terms(data.predictions(), data.outcomes(), variance, errors);

  kernels::compensated_prefix_sum(variance, proc.times);
  proc.total_variance = proc.times.back();
  for (double& t : proc.times) {
    t /= proc.total_variance;
  }

  kernels::compensated_prefix_sum(errors, proc.raw_sums);
  const double root = std::sqrt(proc.total_variance);
  const auto count = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    proc.walk[i] = proc.raw_sums[i] / root;
    proc.raw_sums[i] /= count;
  }
  return proc;
}

WalkStatistics walk_statistics(const CumulativeProcess& process) {
  const auto predictions = process.source.predictions();
  const kernels::Extremum bm = kernels::max_abs(process.walk);
  const kernels::Extremum raw = kernels::max_abs(process.raw_sums);
  const double s_n = process.walk.back();
  const kernels::Extremum bb = kernels::bridged_max_abs(process.walk, process.times, s_n);

  WalkStatistics stats;
  stats.c_star = raw.value;
  stats.s_star = bm.value;
  stats.s_n = s_n;
  stats.c_n = process.raw_sums.back();
  stats.b_star = bb.value;
  stats.argmax_bm = {bm.index, process.times[bm.index], predictions[bm.index]};
  stats.argmax_bb = {bb.index, process.times[bb.index], predictions[bb.index]};
  return stats;
}

WalkSummary summarize_outcomes(std::span<const double> predictions,
                               std::span<const std::uint8_t> outcomes,
                               std::span<const double> times, double sqrt_total_variance,
                               std::span<double> errors, std::span<double> walk) {
  kernels::prediction_errors(predictions, outcomes, errors);
  kernels::compensated_prefix_sum(errors, walk);
  for (double& s : walk) {
    s /= sqrt_total_variance;
  }
  const double s_n = walk.back();
  return {kernels::max_abs(walk).value, kernels::bridged_max_abs(walk, times, s_n).value, s_n};
}

}  // namespace cumcal
