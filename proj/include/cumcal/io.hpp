#pragma once

// CSV input, JSON reports and study results, and key = value config files.
//
// JSON layout (schema 1). Optional sections are omitted, never null.
//
//   report: schema, tool_version, timestamp, dataset{...}, bm{...}, bb{...},
//           [conditional], [hosmer_lemeshow], [weak_calibration], [monte_carlo]
//   study:  schema, tool_version, kind, family, grids, replications, seed,
//           alpha, cells[{scenario{...}, tests{name: {rejections, pvalues}},
//           lr_nonconverged, hl_degenerate}]
//
// Indices are zero-based. Reals are written in shortest round-trip form.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cumcal/calibration_tests.hpp"
#include "cumcal/core.hpp"
#include "cumcal/sim.hpp"

namespace cumcal::io {

/// Unreadable or unwritable file, or a malformed document.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvOptions {
  std::string prediction_column = "p";
  std::string outcome_column = "y";
  std::optional<double> clamp_epsilon;
};

/// Header row required; other columns are ignored. Row numbers in error
/// messages count data rows from 1. Parse errors throw DataError.
CalibrationDataset read_dataset_csv(std::istream& in, const CsvOptions& options = {});
CalibrationDataset read_dataset_csv(const std::filesystem::path& path,
                                    const CsvOptions& options = {});

struct DatasetSummary {
  std::size_t n = 0;
  std::size_t events = 0;
  double mean_prediction = 0.0;
  double total_variance = 0.0;
  bool has_ties = false;
  bool small_sample_warning = false;  // total variance below kSmallSampleVariance

  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

struct MonteCarloSection {
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  double bm_p_value = 1.0;
  double bb_p_value = 1.0;
  double p_a = 1.0;
  double p_b = 1.0;

  friend bool operator==(const MonteCarloSection&, const MonteCarloSection&) = default;
};

struct HLSection {
  double statistic = 0.0;
  int groups = 0;
  int df = 0;
  double p_value = 1.0;
  std::vector<HLGroup> table;
};

struct AnalysisReport {
  int schema = 1;
  std::string tool_version;
  std::string timestamp;  // ISO 8601, UTC
  DatasetSummary dataset;
  BMTestResult bm;
  BBTestResult bb;
  std::optional<ConditionalTestResult> conditional;
  std::optional<HLSection> hosmer_lemeshow;
  std::optional<WeakCalibResult> weak_calibration;
  std::optional<MonteCarloSection> monte_carlo;
};

bool operator==(const AnalysisReport& a, const AnalysisReport& b);

/// Current time in UTC, or SOURCE_DATE_EPOCH when that is set.
std::string report_timestamp();

/// BM, BB and the conditional test; HL and weak calibration when requested.
struct ReportOptions {
  std::optional<int> hl_groups = 10;
  HLDegreesOfFreedom hl_df = HLDegreesOfFreedom::GroupsMinusTwo;
  bool weak_calibration = true;
  std::size_t monte_carlo_replications = 0;  // 0 = skip
  std::uint64_t seed = 1;
  unsigned threads = 0;
};
AnalysisReport build_report(const CalibrationDataset& data, const ReportOptions& options = {});

void write_report_json(const AnalysisReport& report, std::ostream& out);
void write_report_json(const AnalysisReport& report, const std::filesystem::path& path);
AnalysisReport read_report_json(std::istream& in);
AnalysisReport read_report_json(const std::filesystem::path& path);

/// Wall times are not serialized, so identical studies give identical files.
void write_study_json(const StudyResult& study, std::ostream& out);
void write_study_json(const StudyResult& study, const std::filesystem::path& path);
StudyResult read_study_json(std::istream& in);
StudyResult read_study_json(const std::filesystem::path& path);

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
/// Keys may repeat; order is preserved.
std::vector<std::pair<std::string, std::string>> read_config(std::istream& in);
std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace cumcal::io
