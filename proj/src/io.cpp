#include "cumcal/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cumcal/dist.hpp"
#include "cumcal/version.hpp"

namespace cumcal::io {

using Json = nlohmann::ordered_json;

namespace {

// --- CSV ----------------------------------------------------------------------

// One RFC-4180 record. Returns false at end of input. Quoted fields may
// contain commas, doubled quotes and line breaks.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) {
    return false;
  }
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') {
        in.get();
      }
      break;
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw DataError("unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return true;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

std::optional<double> parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) {
    return std::nullopt;
  }
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') {
    ++begin;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) {
      return i;
    }
  }
  throw DataError("missing column '" + name + "'");
}

// --- JSON helpers ---------------------------------------------------------------

// Non-finite reals (standard errors of a failed fit) are written as null.
Json real(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double get_real(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return v.get<double>();
}

bool same_real(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

Json location_json(const WalkLocation& loc) {
  return Json{{"index", loc.index}, {"time", loc.time}, {"prediction", loc.prediction}};
}

WalkLocation location_from(const Json& j) {
  return {j.at("index").get<std::size_t>(), j.at("time").get<double>(),
          j.at("prediction").get<double>()};
}

bool same_location(const WalkLocation& a, const WalkLocation& b) {
  return a.index == b.index && a.time == b.time && a.prediction == b.prediction;
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  return out;
}

std::ifstream open_for_reading(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  return in;
}

Json parse_json(std::istream& in) {
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

void require_schema(const Json& j) {
  if (!j.contains("schema") || j.at("schema") != 1) {
    throw IoError("unsupported or missing schema version");
  }
}

template <typename F>
auto translate(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

// --- CSV ----------------------------------------------------------------------

CalibrationDataset read_dataset_csv(std::istream& in, const CsvOptions& options) {
  // UTF-8 byte-order mark.
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
    if (!(in.gcount() == 3 && static_cast<unsigned char>(bom[1]) == 0xBB &&
          static_cast<unsigned char>(bom[2]) == 0xBF)) {
      throw DataError("unrecognized byte sequence at start of file");
    }
  }
  std::vector<std::string> header;
  if (!read_record(in, header) || blank_record(header)) {
    throw DataError("empty file");
  }
  const std::size_t p_col = column_index(header, options.prediction_column);
  const std::size_t y_col = column_index(header, options.outcome_column);
  const std::size_t needed = std::max(p_col, y_col) + 1;

  std::vector<double> predictions;
  std::vector<int> outcomes;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (read_record(in, fields)) {
    if (blank_record(fields)) {
      continue;
    }
    ++row;
    const std::string where = "row " + std::to_string(row);
    if (fields.size() < needed) {
      throw DataError(where + ": expected at least " + std::to_string(needed) + " fields");
    }
    const auto p = parse_real(fields[p_col]);
    if (!p) {
      throw DataError(where + ": non-numeric value '" + trim(fields[p_col]) + "' in column '" +
                      options.prediction_column + "'");
    }
    const auto y = parse_real(fields[y_col]);
    if (!y) {
      throw DataError(where + ": non-numeric value '" + trim(fields[y_col]) + "' in column '" +
                      options.outcome_column + "'");
    }
    if (!options.clamp_epsilon && !(*p > 0.0 && *p < 1.0)) {
      throw DataError(where + ": prediction " + trim(fields[p_col]) + " outside (0,1)");
    }
    if (*y != 0.0 && *y != 1.0) {
      throw DataError(where + ": outcome must be 0 or 1");
    }
    predictions.push_back(*p);
    outcomes.push_back(static_cast<int>(*y));
  }
  if (predictions.empty()) {
    throw DataError("no data rows");
  }
  return build_dataset(predictions, outcomes, options.clamp_epsilon);
}

CalibrationDataset read_dataset_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in = open_for_reading(path);
  return read_dataset_csv(in, options);
}

// --- reports --------------------------------------------------------------------

bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
  auto same_bm = [](const BMTestResult& x, const BMTestResult& y) {
    return x.c_star == y.c_star && x.s_star == y.s_star && same_location(x.location, y.location) &&
           x.p_value == y.p_value;
  };
  auto same_bb = [](const BBTestResult& x, const BBTestResult& y) {
    return x.c_n == y.c_n && x.s_n == y.s_n && x.p_a == y.p_a && x.b_star == y.b_star &&
           x.p_b == y.p_b && same_location(x.location_bridge, y.location_bridge) &&
           x.p_unified == y.p_unified;
  };
  auto same_conditional = [](const ConditionalTestResult& x, const ConditionalTestResult& y) {
    return x.p_a == y.p_a && x.p_conditional == y.p_conditional;
  };
  auto same_hl = [](const HLSection& x, const HLSection& y) {
    if (!(x.statistic == y.statistic && x.groups == y.groups && x.df == y.df &&
          x.p_value == y.p_value && x.table.size() == y.table.size())) {
      return false;
    }
    for (std::size_t i = 0; i < x.table.size(); ++i) {
      const HLGroup& g = x.table[i];
      const HLGroup& h = y.table[i];
      if (!(g.size == h.size && g.observed == h.observed && g.expected == h.expected &&
            g.mean_prediction == h.mean_prediction)) {
        return false;
      }
    }
    return true;
  };
  auto same_weak = [](const WeakCalibResult& x, const WeakCalibResult& y) {
    return same_real(x.intercept, y.intercept) && same_real(x.slope, y.slope) &&
           same_real(x.intercept_se, y.intercept_se) && same_real(x.slope_se, y.slope_se) &&
           same_real(x.lr_statistic, y.lr_statistic) && x.p_value == y.p_value &&
           x.converged == y.converged && x.iterations == y.iterations;
  };
  auto same_optional = [](const auto& x, const auto& y, auto eq) {
    return x.has_value() == y.has_value() && (!x || eq(*x, *y));
  };
  return a.schema == b.schema && a.tool_version == b.tool_version &&
         a.timestamp == b.timestamp && a.dataset == b.dataset && same_bm(a.bm, b.bm) &&
         same_bb(a.bb, b.bb) && same_optional(a.conditional, b.conditional, same_conditional) &&
         same_optional(a.hosmer_lemeshow, b.hosmer_lemeshow, same_hl) &&
         same_optional(a.weak_calibration, b.weak_calibration, same_weak) &&
         a.monte_carlo == b.monte_carlo;
}

std::string report_timestamp() {
  std::time_t when = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    long long value = 0;
    const std::string_view text(epoch);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
      when = static_cast<std::time_t>(value);
    }
  }
  std::tm utc{};
  gmtime_r(&when, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

AnalysisReport build_report(const CalibrationDataset& data, const ReportOptions& options) {
  const CumulativeProcess process = cumulative_process(data);
  AnalysisReport report;
  report.tool_version = kVersion;
  report.timestamp = report_timestamp();
  report.dataset = {data.size(),
                    data.event_count(),
                    data.mean_prediction(),
                    process.total_variance,
                    data.has_ties(),
                    process.total_variance < kSmallSampleVariance};
  report.bm = bm_test(process);
  report.bb = bb_test(process);
  report.conditional = conditional_bm_test(process);
  if (options.hl_groups) {
    try {
      const HLTestResult hl = hosmer_lemeshow_test(data, *options.hl_groups, options.hl_df);
      report.hosmer_lemeshow = HLSection{hl.statistic, hl.groups, hl.df, hl.p_value,
                                         hl.group_table};
    } catch (const std::logic_error&) {
      // Fewer observations than groups, or a degenerate group: no statistic,
      // so the section is left out.
    }
  }
  if (options.weak_calibration) {
    report.weak_calibration = weak_calibration_lr_test(data);
  }
  if (options.monte_carlo_replications > 0) {
    const MonteCarloResult bm = monte_carlo_test_detail(
        data, MonteCarloStatistic::BM, options.monte_carlo_replications, options.seed,
        options.threads);
    const double bb_p = fisher_combine_p(bm.p_a, bm.p_b);
    report.monte_carlo =
        MonteCarloSection{options.monte_carlo_replications, options.seed, bm.p_value, bb_p,
                          bm.p_a, bm.p_b};
  }
  return report;
}

void write_report_json(const AnalysisReport& report, std::ostream& out) {
  Json j;
  j["schema"] = report.schema;
  j["tool_version"] = report.tool_version;
  j["timestamp"] = report.timestamp;
  const DatasetSummary& d = report.dataset;
  j["dataset"] = Json{{"n", d.n},
                      {"events", d.events},
                      {"mean_prediction", d.mean_prediction},
                      {"total_variance", d.total_variance},
                      {"has_ties", d.has_ties},
                      {"small_sample_warning", d.small_sample_warning}};
  j["bm"] = Json{{"c_star", report.bm.c_star},
                 {"s_star", report.bm.s_star},
                 {"location", location_json(report.bm.location)},
                 {"p_value", report.bm.p_value}};
  j["bb"] = Json{{"c_n", report.bb.c_n},
                 {"s_n", report.bb.s_n},
                 {"p_a", report.bb.p_a},
                 {"b_star", report.bb.b_star},
                 {"p_b", report.bb.p_b},
                 {"location", location_json(report.bb.location_bridge)},
                 {"p_unified", report.bb.p_unified}};
  if (report.conditional) {
    j["conditional"] = Json{{"p_a", report.conditional->p_a},
                            {"p_conditional", report.conditional->p_conditional}};
  }
  if (report.hosmer_lemeshow) {
    const HLSection& hl = *report.hosmer_lemeshow;
    Json table = Json::array();
    for (const HLGroup& g : hl.table) {
      table.push_back(Json{{"size", g.size},
                           {"observed", g.observed},
                           {"expected", g.expected},
                           {"mean_prediction", g.mean_prediction}});
    }
    j["hosmer_lemeshow"] = Json{{"statistic", hl.statistic},
                                {"groups", hl.groups},
                                {"df", hl.df},
                                {"p_value", hl.p_value},
                                {"table", table}};
  }
  if (report.weak_calibration) {
    const WeakCalibResult& w = *report.weak_calibration;
    Json section{{"intercept", real(w.intercept)},
                 {"slope", real(w.slope)},
                 {"intercept_se", real(w.intercept_se)},
                 {"slope_se", real(w.slope_se)},
                 {"lr_statistic", real(w.lr_statistic)}};
    if (w.p_value) {
      section["p_value"] = *w.p_value;
    }
    section["converged"] = w.converged;
    section["iterations"] = w.iterations;
    j["weak_calibration"] = section;
  }
  if (report.monte_carlo) {
    const MonteCarloSection& m = *report.monte_carlo;
    j["monte_carlo"] = Json{{"replications", m.replications},
                            {"seed", m.seed},
                            {"bm_p_value", m.bm_p_value},
                            {"bb_p_value", m.bb_p_value},
                            {"p_a", m.p_a},
                            {"p_b", m.p_b}};
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw IoError("failed to write report");
  }
}

void write_report_json(const AnalysisReport& report, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  write_report_json(report, out);
}

AnalysisReport read_report_json(std::istream& in) {
  const Json j = parse_json(in);
  return translate([&] {
    require_schema(j);
    AnalysisReport report;
    report.schema = j.at("schema").get<int>();
    report.tool_version = j.at("tool_version").get<std::string>();
    report.timestamp = j.at("timestamp").get<std::string>();
    const Json& d = j.at("dataset");
    report.dataset = {d.at("n").get<std::size_t>(),
                      d.at("events").get<std::size_t>(),
                      d.at("mean_prediction").get<double>(),
                      d.at("total_variance").get<double>(),
                      d.at("has_ties").get<bool>(),
                      d.at("small_sample_warning").get<bool>()};
    const Json& bm = j.at("bm");
    report.bm = {bm.at("c_star").get<double>(), bm.at("s_star").get<double>(),
                 location_from(bm.at("location")), bm.at("p_value").get<double>()};
    const Json& bb = j.at("bb");
    report.bb = {bb.at("c_n").get<double>(),    bb.at("s_n").get<double>(),
                 bb.at("p_a").get<double>(),    bb.at("b_star").get<double>(),
                 bb.at("p_b").get<double>(),    location_from(bb.at("location")),
                 bb.at("p_unified").get<double>()};
    if (j.contains("conditional")) {
      const Json& c = j.at("conditional");
      report.conditional =
          ConditionalTestResult{c.at("p_a").get<double>(), c.at("p_conditional").get<double>()};
    }
    if (j.contains("hosmer_lemeshow")) {
      const Json& h = j.at("hosmer_lemeshow");
      HLSection hl{h.at("statistic").get<double>(), h.at("groups").get<int>(),
                   h.at("df").get<int>(), h.at("p_value").get<double>(), {}};
      for (const Json& g : h.at("table")) {
        hl.table.push_back({g.at("size").get<std::size_t>(), g.at("observed").get<double>(),
                            g.at("expected").get<double>(),
                            g.at("mean_prediction").get<double>()});
      }
      report.hosmer_lemeshow = std::move(hl);
    }
    if (j.contains("weak_calibration")) {
      const Json& w = j.at("weak_calibration");
      WeakCalibResult weak;
      weak.intercept = get_real(w, "intercept");
      weak.slope = get_real(w, "slope");
      weak.intercept_se = get_real(w, "intercept_se");
      weak.slope_se = get_real(w, "slope_se");
      weak.lr_statistic = get_real(w, "lr_statistic");
      if (w.contains("p_value")) {
        weak.p_value = w.at("p_value").get<double>();
      }
      weak.converged = w.at("converged").get<bool>();
      weak.iterations = w.at("iterations").get<int>();
      report.weak_calibration = weak;
    }
    if (j.contains("monte_carlo")) {
      const Json& m = j.at("monte_carlo");
      report.monte_carlo = MonteCarloSection{
          m.at("replications").get<std::size_t>(), m.at("seed").get<std::uint64_t>(),
          m.at("bm_p_value").get<double>(),        m.at("bb_p_value").get<double>(),
          m.at("p_a").get<double>(),               m.at("p_b").get<double>()};
    }
    return report;
  });
}

AnalysisReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);
  return read_report_json(in);
}

// --- studies --------------------------------------------------------------------

void write_study_json(const StudyResult& study, std::ostream& out) {
  Json j;
  j["schema"] = 1;
  j["tool_version"] = kVersion;
  j["kind"] = study.kind == StudyKind::Null ? "null" : "power";
  j["family"] = std::string(family_name(study.family));
  j["beta0_grid"] = study.beta0_grid;
  j["a_grid"] = study.a_grid;
  j["b_grid"] = study.b_grid;
  j["n_grid"] = study.n_grid;
  j["replications"] = study.replications;
  j["seed"] = study.seed;
  j["alpha"] = study.alpha;
  Json cells = Json::array();
  for (const SimulationSummary& cell : study.cells) {
    const SimulationScenario& s = cell.scenario;
    Json scenario{{"family", std::string(family_name(s.family))},
                  {"beta0", s.beta0},
                  {"a", s.a},
                  {"b", s.b},
                  {"n", s.n},
                  {"replications", s.replications},
                  {"seed", s.seed},
                  {"alpha", s.alpha}};
    Json tests = Json::object();
    for (const TestTally& t : cell.tallies) {
      tests[std::string(test_name(t.kind))] =
          Json{{"rejections", t.rejections},
               {"rejection_rate", cell.rejection(t.kind)},
               {"pvalues", t.pvalues}};
    }
    cells.push_back(Json{{"scenario", scenario},
                         {"tests", tests},
                         {"lr_nonconverged", cell.lr_nonconverged},
                         {"hl_degenerate", cell.hl_degenerate}});
  }
  j["cells"] = cells;
  out << j.dump(2) << '\n';
  if (!out) {
    throw IoError("failed to write study");
  }
}

void write_study_json(const StudyResult& study, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  write_study_json(study, out);
}

StudyResult read_study_json(std::istream& in) {
  const Json j = parse_json(in);
  return translate([&] {
    require_schema(j);
    auto family_of = [](const Json& v) {
      const auto family = parse_family(v.get<std::string>());
      if (!family) {
        throw IoError("unknown scenario family " + v.get<std::string>());
      }
      return *family;
    };
    StudyResult study;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "null" && kind != "power") {
      throw IoError("unknown study kind " + kind);
    }
    study.kind = kind == "null" ? StudyKind::Null : StudyKind::Power;
    study.family = family_of(j.at("family"));
    study.beta0_grid = j.at("beta0_grid").get<std::vector<double>>();
    study.a_grid = j.at("a_grid").get<std::vector<double>>();
    study.b_grid = j.at("b_grid").get<std::vector<double>>();
    study.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    study.replications = j.at("replications").get<std::size_t>();
    study.seed = j.at("seed").get<std::uint64_t>();
    study.alpha = j.at("alpha").get<double>();
    for (const Json& c : j.at("cells")) {
      SimulationSummary cell;
      const Json& s = c.at("scenario");
      cell.scenario.family = family_of(s.at("family"));
      cell.scenario.beta0 = s.at("beta0").get<double>();
      cell.scenario.a = s.at("a").get<double>();
      cell.scenario.b = s.at("b").get<double>();
      cell.scenario.n = s.at("n").get<std::size_t>();
      cell.scenario.replications = s.at("replications").get<std::size_t>();
      cell.scenario.seed = s.at("seed").get<std::uint64_t>();
      cell.scenario.alpha = s.at("alpha").get<double>();
      for (const auto& [name, t] : c.at("tests").items()) {
        const auto kind_of = parse_test_name(name);
        if (!kind_of) {
          throw IoError("unknown test " + name);
        }
        cell.tallies.push_back(TestTally{*kind_of, t.at("rejections").get<std::size_t>(),
                                         t.at("pvalues").get<std::vector<double>>()});
      }
      cell.lr_nonconverged = c.at("lr_nonconverged").get<std::size_t>();
      cell.hl_degenerate = c.at("hl_degenerate").get<std::size_t>();
      study.cells.push_back(std::move(cell));
    }
    return study;
  });
}

StudyResult read_study_json(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);
  return read_study_json(in);
}

// --- config ---------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> read_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw IoError("config line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(text.substr(0, eq));
    if (key.empty()) {
      throw IoError("config line " + std::to_string(number) + ": empty key");
    }
    entries.emplace_back(std::move(key), trim(text.substr(eq + 1)));
  }
  return entries;
}

std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);
  return read_config(in);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out = open_for_writing(path);
  out << content;
  if (!out) {
    throw IoError("failed to write " + path.string());
  }
}

}  // namespace cumcal::io
