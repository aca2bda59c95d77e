#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cumcal/calibration_tests.hpp"
#include "cumcal/casestudy.hpp"
#include "cumcal/core.hpp"
#include "cumcal/io.hpp"
#include "cumcal/kernels.hpp"
#include "cumcal/plot.hpp"
#include "cumcal/sim.hpp"
#include "cumcal/version.hpp"

namespace cumcal::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmt_p(double p) {
  if (p < 1e-4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", p);
    return buf;
  }
  return fmt(p);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return {};
  }
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string> split_grid(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    items.push_back(trim(item));
  }
  if (!text.empty() && text.back() == ',') {
    items.emplace_back();
  }
  if (items.empty()) {
    throw UsageError("empty grid");
  }
  return items;
}

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw UsageError("invalid number '" + text + "' in grid");
  }
  return value;
}

std::string output_dir(const std::string& flag) {
  if (!flag.empty()) {
    return flag;
  }
  if (const char* env = std::getenv("CUMCAL_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "cumcal-out";
}

// Long options followed by a negative number or grid ("-1/4,0") are joined
// into --name=value so the value is not mistaken for a flag.
std::vector<std::string> join_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.starts_with("--") && a.find('=') == std::string::npos && i + 1 < args.size()) {
      const std::string& next = args[i + 1];
      if (next.size() >= 2 && next[0] == '-' &&
          (std::isdigit(static_cast<unsigned char>(next[1])) || next[1] == '.')) {
        out.push_back(a + "=" + next);
        ++i;
        continue;
      }
    }
    out.push_back(a);
  }
  return out;
}

const std::vector<std::string> kSubcommands = {"test", "simulate", "plot", "casestudy"};

// Replaces --config FILE with --key=value arguments placed right after the
// subcommand name, so flags given on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> from_config;
  for (std::size_t i = 0; i < args.size();) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw UsageError("--config requires a file");
      }
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
      continue;
    }
    for (const auto& [key, value] : io::read_config(fs::path(path))) {
      from_config.push_back("--" + key + "=" + value);
    }
  }
  if (from_config.empty()) {
    return args;
  }
  const auto sub = std::find_first_of(args.begin(), args.end(), kSubcommands.begin(),
                                      kSubcommands.end());
  if (sub == args.end()) {
    throw UsageError("--config needs a subcommand");
  }
  args.insert(sub + 1, from_config.begin(), from_config.end());
  return args;
}

// --- test ---------------------------------------------------------------------

struct TestArgs {
  std::string input;
  std::string prediction_column = "p";
  std::string outcome_column = "y";
  std::optional<double> clamp;
  int groups = 10;
  std::string df_rule = "groups-minus-two";
  double alpha = 0.05;
  std::size_t mc = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  bool no_plots = false;
};

io::CsvOptions csv_options(const TestArgs& args) {
  return {args.prediction_column, args.outcome_column, args.clamp};
}

void print_report(const io::AnalysisReport& report, std::ostream& out) {
  const io::DatasetSummary& d = report.dataset;
  out << "n = " << d.n << "  events = " << d.events << "  mean prediction = "
      << fmt(d.mean_prediction) << "  total variance T = " << fmt(d.total_variance, 2) << '\n';
  out << "BM test: S* = " << fmt(report.bm.s_star) << " (C* = " << fmt(report.bm.c_star)
      << ") at pi* = " << fmt(report.bm.location.prediction, 3)
      << " (t = " << fmt(report.bm.location.time, 3) << "), p = " << fmt_p(report.bm.p_value)
      << '\n';
  out << "BB test: S_n = " << fmt(report.bb.s_n) << " (C_n = " << fmt(report.bb.c_n)
      << "), p_A = " << fmt_p(report.bb.p_a) << "; B* = " << fmt(report.bb.b_star)
      << " at pi* = " << fmt(report.bb.location_bridge.prediction, 3)
      << " (t = " << fmt(report.bb.location_bridge.time, 3) << "), p_B = "
      << fmt_p(report.bb.p_b) << "; unified p = " << fmt_p(report.bb.p_unified) << '\n';
  if (report.conditional) {
    out << "Conditional BM test: p = " << fmt_p(report.conditional->p_conditional) << '\n';
  }
  if (report.hosmer_lemeshow) {
    const io::HLSection& hl = *report.hosmer_lemeshow;
    out << "Hosmer-Lemeshow: statistic = " << fmt(hl.statistic) << " on " << hl.df
        << " df (" << hl.groups << " groups), p = " << fmt_p(hl.p_value) << '\n';
  }
  if (report.weak_calibration) {
    const WeakCalibResult& w = *report.weak_calibration;
    out << "Recalibration LR test: intercept = " << fmt(w.intercept)
        << ", slope = " << fmt(w.slope) << ", LR = " << fmt(w.lr_statistic);
    if (w.p_value) {
      out << ", p = " << fmt_p(*w.p_value) << '\n';
    } else {
      out << ", fit did not converge\n";
    }
  }
  if (report.monte_carlo) {
    const io::MonteCarloSection& m = *report.monte_carlo;
    out << "Monte Carlo (" << m.replications << " replications, seed " << m.seed
        << "): BM p = " << fmt_p(m.bm_p_value) << ", BB p = " << fmt_p(m.bb_p_value)
        << " (p_A = " << fmt_p(m.p_a) << ", p_B = " << fmt_p(m.p_b) << ")\n";
  }
  if (d.has_ties) {
    out << "warning: tied predictions; the walk follows input order within ties\n";
  }
  if (d.small_sample_warning) {
    out << "warning: total variance " << fmt(d.total_variance, 2) << " is below "
        << fmt(kSmallSampleVariance, 0)
        << "; asymptotic p-values may be inaccurate (consider --mc)\n";
  }
}

void write_cumulative_plots(const CumulativeProcess& process, const BMTestResult& bm,
                            const BBTestResult& bb, const PlotStyle& style, const fs::path& dir,
                            const std::string& prefix, std::ostream& out) {
  const fs::path bm_path = dir / (prefix + "cumulative_bm.svg");
  const fs::path bb_path = dir / (prefix + "cumulative_bb.svg");
  io::write_text_file(bm_path, render_cumulative_plot(process, bm, style));
  io::write_text_file(bb_path, render_cumulative_plot(process, bb, style));
  out << "wrote " << bm_path.string() << '\n' << "wrote " << bb_path.string() << '\n';
}

void write_binned_plot(const CalibrationDataset& data, int groups, const PlotStyle& style,
                       const fs::path& dir, const std::string& prefix, std::ostream& out) {
  if (data.size() < static_cast<std::size_t>(groups)) {
    out << "binned calibration plot skipped: fewer observations than groups\n";
    return;
  }
  const fs::path binned = dir / (prefix + "calibration_binned.svg");
  io::write_text_file(binned, render_binned_calibration_plot(data, groups, style));
  out << "wrote " << binned.string() << '\n';
}

int cmd_test(const TestArgs& args, std::ostream& out) {
  const CalibrationDataset data = io::read_dataset_csv(fs::path(args.input), csv_options(args));
  io::ReportOptions options;
  options.hl_groups = args.groups > 0 ? std::optional<int>(args.groups) : std::nullopt;
  options.hl_df = args.df_rule == "groups" ? HLDegreesOfFreedom::Groups
                                           : HLDegreesOfFreedom::GroupsMinusTwo;
  options.monte_carlo_replications = args.mc;
  options.seed = args.seed;
  options.threads = args.threads;
  const io::AnalysisReport report = io::build_report(data, options);
  print_report(report, out);
  if (options.hl_groups && !report.hosmer_lemeshow) {
    out << "Hosmer-Lemeshow: not computed (fewer observations than groups, or a degenerate "
           "group)\n";
  }

  const fs::path dir = output_dir(args.out);
  const fs::path report_path = dir / "report.json";
  io::write_report_json(report, report_path);
  out << "wrote " << report_path.string() << '\n';
  if (!args.no_plots) {
    PlotStyle style;
    style.significance_level = args.alpha;
    const CumulativeProcess process = cumulative_process(data);
    write_cumulative_plots(process, report.bm, report.bb, style, dir, "", out);
    write_binned_plot(data, args.groups > 1 ? args.groups : 10, style, dir, "", out);
  }
  return kOk;
}

// --- simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string kind;
  std::string family = "logit-linear";
  std::string beta0 = "-2,-1,0";
  std::string a = "-1/4,-1/8,0,1/8,1/4";
  std::string b = "1/2,3/4,1,4/3,2";
  std::string n = "50,100,250,1000";
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double alpha = 0.05;
  std::string out;
  bool no_plots = false;
  bool no_pvalues = false;
};

void print_study(const StudyResult& study, std::ostream& out) {
  for (const SimulationSummary& cell : study.cells) {
    const SimulationScenario& s = cell.scenario;
    out << family_name(s.family) << "  n = " << s.n;
    if (study.kind == StudyKind::Null) {
      out << "  beta0 = " << fmt(s.beta0, 3);
    } else {
      out << "  a = " << fmt(s.a, 3) << "  b = " << fmt(s.b, 3);
    }
    out << "  rejection:";
    for (const TestTally& t : cell.tallies) {
      out << ' ' << test_name(t.kind) << ' ' << fmt(cell.rejection(t.kind), 3);
    }
    if (cell.lr_nonconverged > 0) {
      out << "  [LR non-converged " << cell.lr_nonconverged << ']';
    }
    if (cell.hl_degenerate > 0) {
      out << "  [HL degenerate " << cell.hl_degenerate << ']';
    }
    out << "  (" << fmt(cell.wall_seconds, 2) << " s)\n";
  }
}

void write_study_figures(const StudyResult& study, const fs::path& dir, std::ostream& out) {
  const std::vector<std::string> figures = render_study_figures(study);
  for (std::size_t i = 0; i < figures.size(); ++i) {
    const fs::path path =
        study.kind == StudyKind::Null
            ? dir / "null_ecdf.svg"
            : dir / ("power_" + std::string(family_name(study.family)) + "_n" +
                     std::to_string(study.n_grid[i]) + ".svg");
    io::write_text_file(path, figures[i]);
    out << "wrote " << path.string() << '\n';
  }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  StudyOptions options;
  options.threads = args.threads;
  options.keep_pvalues = !args.no_pvalues;
  const std::vector<std::size_t> n_grid = parse_size_grid(args.n);
  StudyResult study;
  if (args.kind == "null") {
    const std::vector<double> beta0 = parse_real_grid(args.beta0);
    study = run_null_study(beta0, n_grid, args.reps, args.seed, args.alpha, options);
  } else {
    const auto family = parse_family(args.family);
    if (!family || *family == ScenarioFamily::Null) {
      throw UsageError("--family must be logit-linear or logit-power");
    }
    const std::vector<double> a = parse_real_grid(args.a);
    const std::vector<double> b = parse_real_grid(args.b);
    study = run_power_study(*family, a, b, n_grid, args.reps, args.seed, args.alpha, options);
  }
  print_study(study, out);
  const fs::path dir = output_dir(args.out);
  const fs::path path = dir / (args.kind + "_study.json");
  io::write_study_json(study, path);
  out << "wrote " << path.string() << '\n';
  if (!args.no_plots) {
    write_study_figures(study, dir, out);
  }
  return kOk;
}

// --- plot -----------------------------------------------------------------------

struct PlotArgs {
  std::string report;
  std::string data;
  std::string study;
  std::string prediction_column = "p";
  std::string outcome_column = "y";
  std::optional<double> clamp;
  double alpha = 0.05;
  std::string out;
};

int cmd_plot(const PlotArgs& args, std::ostream& out) {
  const fs::path dir = output_dir(args.out);
  if (!args.study.empty()) {
    write_study_figures(io::read_study_json(fs::path(args.study)), dir, out);
    return kOk;
  }
  if (args.report.empty() || args.data.empty()) {
    throw UsageError("plot needs --study, or --report together with --data");
  }
  const io::AnalysisReport report = io::read_report_json(fs::path(args.report));
  const CalibrationDataset data = io::read_dataset_csv(
      fs::path(args.data), io::CsvOptions{args.prediction_column, args.outcome_column, args.clamp});
  PlotStyle style;
  style.significance_level = args.alpha;
  write_cumulative_plots(cumulative_process(data), report.bm, report.bb, style, dir, "", out);
  return kOk;
}

// --- casestudy ------------------------------------------------------------------

struct CaseStudyArgs {
  std::uint64_t seed = 1;
  std::size_t development = CaseStudyConfig{}.development;
  std::size_t small = CaseStudyConfig{}.small_development;
  std::size_t validation = CaseStudyConfig{}.validation;
  std::string out;
  bool no_plots = false;
};

int cmd_casestudy(const CaseStudyArgs& args, std::ostream& out) {
  CaseStudyConfig config;
  config.seed = args.seed;
  config.development = args.development;
  config.small_development = args.small;
  config.validation = args.validation;
  const CaseStudyResult result = run_case_study(config);
  const fs::path dir = output_dir(args.out);

  out << "development n = " << config.development << " (event rate "
      << fmt(result.development_event_rate, 3) << "), small subset n = "
      << config.small_development << " (event rate "
      << fmt(result.small_development_event_rate, 3) << "), validation n = " << config.validation
      << " (event rate " << fmt(result.validation_event_rate, 3) << ")\n";

  nlohmann::ordered_json summary;
  summary["schema"] = 1;
  summary["tool_version"] = kVersion;
  summary["seed"] = config.seed;
  summary["development"] = config.development;
  summary["small_development"] = config.small_development;
  summary["validation"] = config.validation;
  summary["covariates"] = kCaseStudyCovariates;
  summary["true_coefficients"] = result.true_coefficients;
  summary["event_rates"] = {{"development", result.development_event_rate},
                            {"small_development", result.small_development_event_rate},
                            {"validation", result.validation_event_rate}};
  nlohmann::ordered_json models = nlohmann::ordered_json::array();

  for (const CaseStudyModel* model : {&result.full, &result.small}) {
    out << "\n[" << model->name << " model, fitted on " << model->development_size
        << " observations" << (model->converged ? "" : ", NOT converged")
        << "] c-statistic = " << fmt(model->c_statistic, 3) << '\n';
    io::ReportOptions options;
    const io::AnalysisReport report = io::build_report(model->validation, options);
    print_report(report, out);
    const std::string prefix = model->name + "_";
    const fs::path report_path = dir / (prefix + "report.json");
    io::write_report_json(report, report_path);
    out << "wrote " << report_path.string() << '\n';
    if (!args.no_plots) {
      const PlotStyle style;
      write_binned_plot(model->validation, 10, style, dir, prefix, out);
      write_cumulative_plots(cumulative_process(model->validation), report.bm, report.bb, style,
                             dir, prefix, out);
    }
    models.push_back({{"name", model->name},
                      {"development_size", model->development_size},
                      {"converged", model->converged},
                      {"coefficients", model->coefficients},
                      {"c_statistic", model->c_statistic},
                      {"report", prefix + "report.json"}});
  }
  summary["models"] = models;
  const fs::path summary_path = dir / "casestudy.json";
  io::write_text_file(summary_path, summary.dump(2) + "\n");
  out << "wrote " << summary_path.string() << '\n';
  return kOk;
}

}  // namespace

std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> values;
  for (const std::string& item : split_grid(text)) {
    const auto slash = item.find('/');
    if (slash == std::string::npos) {
      values.push_back(parse_number(item));
      continue;
    }
    const double num = parse_number(trim(item.substr(0, slash)));
    const double den = parse_number(trim(item.substr(slash + 1)));
    if (den == 0.0) {
      throw UsageError("zero denominator in grid item '" + item + "'");
    }
    values.push_back(num / den);
  }
  return values;
}

std::vector<std::size_t> parse_size_grid(const std::string& text) {
  std::vector<std::size_t> values;
  for (const std::string& item : split_grid(text)) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || value == 0) {
      throw UsageError("invalid sample size '" + item + "' in grid");
    }
    values.push_back(value);
  }
  return values;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibration tests for binary risk predictions based on cumulative prediction "
               "errors.",
               "cumcal"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "Read key = value defaults for the subcommand's flags from a file");

  TestArgs test_args;
  CLI::App* test = app.add_subcommand("test", "Run the calibration tests on a CSV of predictions");
  test->add_option("input", test_args.input, "CSV file with a header row")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--pred-col", test_args.prediction_column, "Prediction column name")
      ->capture_default_str();
  test->add_option("--outcome-col", test_args.outcome_column, "Outcome column name (0/1)")
      ->capture_default_str();
  test->add_option("--clamp", test_args.clamp,
                   "Clip predictions into [eps, 1-eps] instead of rejecting 0 and 1")
      ->check(CLI::Range(1e-300, 0.4999999));
  test->add_option("--groups", test_args.groups,
                   "Hosmer-Lemeshow groups; 0 skips the test")
      ->capture_default_str()
      ->check(CLI::Range(0, 1000000));
  test->add_option("--df-rule", test_args.df_rule,
                   "Hosmer-Lemeshow degrees of freedom: groups-minus-two or groups")
      ->capture_default_str()
      ->check(CLI::IsMember({"groups-minus-two", "groups"}));
  test->add_option("--alpha", test_args.alpha, "Significance level drawn on the plots")
      ->capture_default_str()
      ->check(CLI::Range(1e-9, 0.999999999));
  test->add_option("--mc", test_args.mc, "Monte Carlo replications for resampled p-values (0 = off)")
      ->capture_default_str();
  test->add_option("--seed", test_args.seed, "Seed for the Monte Carlo p-values")
      ->capture_default_str();
  test->add_option("--threads", test_args.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  test->add_option("--out", test_args.out, "Output directory");
  test->add_flag("--no-plots", test_args.no_plots, "Write the report only");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a null or power simulation study");
  simulate->add_option("kind", sim_args.kind, "null or power")
      ->required()
      ->check(CLI::IsMember({"null", "power"}));
  simulate->add_option("--family", sim_args.family,
                       "Power study family: logit-linear or logit-power")
      ->capture_default_str()
      ->check(CLI::IsMember({"logit-linear", "logit-power"}));
  simulate->add_option("--beta0", sim_args.beta0, "Null study intercept grid")
      ->capture_default_str();
  simulate->add_option("--a", sim_args.a, "Power study intercept-shift grid (fractions allowed)")
      ->capture_default_str();
  simulate->add_option("--b", sim_args.b, "Power study slope/shape grid (fractions allowed)")
      ->capture_default_str();
  simulate->add_option("--n", sim_args.n, "Sample size grid")->capture_default_str();
  simulate->add_option("--reps", sim_args.reps, "Replications per cell")->capture_default_str();
  simulate->add_option("--seed", sim_args.seed, "Root seed")->capture_default_str();
  simulate->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  simulate->add_option("--alpha", sim_args.alpha, "Rejection level")
      ->capture_default_str()
      ->check(CLI::Range(1e-9, 0.999999999));
  simulate->add_option("--out", sim_args.out, "Output directory");
  simulate->add_flag("--no-plots", sim_args.no_plots, "Write the study JSON only");
  simulate->add_flag("--no-pvalues", sim_args.no_pvalues,
                     "Keep rejection counts only (no ECDF panels)");

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot", "Re-render figures from a report or study file");
  plot->add_option("--report", plot_args.report, "Report JSON written by `test`")
      ->check(CLI::ExistingFile);
  plot->add_option("--data", plot_args.data, "The CSV the report was computed from")
      ->check(CLI::ExistingFile);
  plot->add_option("--study", plot_args.study, "Study JSON written by `simulate`")
      ->check(CLI::ExistingFile);
  plot->add_option("--pred-col", plot_args.prediction_column, "Prediction column name")
      ->capture_default_str();
  plot->add_option("--outcome-col", plot_args.outcome_column, "Outcome column name")
      ->capture_default_str();
  plot->add_option("--clamp", plot_args.clamp, "Clip predictions as `test --clamp` did")
      ->check(CLI::Range(1e-300, 0.4999999));
  plot->add_option("--alpha", plot_args.alpha, "Significance level drawn on the plots")
      ->capture_default_str()
      ->check(CLI::Range(1e-9, 0.999999999));
  plot->add_option("--out", plot_args.out, "Output directory");

  CaseStudyArgs case_args;
  CLI::App* casestudy =
      app.add_subcommand("casestudy", "Synthetic full-sample versus small-sample model validation");
  casestudy->add_option("--seed", case_args.seed, "Seed")->capture_default_str();
  casestudy->add_option("--development", case_args.development, "Development sample size")
      ->capture_default_str();
  casestudy->add_option("--small", case_args.small, "Size of the small development subset")
      ->capture_default_str();
  casestudy->add_option("--validation", case_args.validation, "Validation sample size")
      ->capture_default_str();
  casestudy->add_option("--out", case_args.out, "Output directory");
  casestudy->add_flag("--no-plots", case_args.no_plots, "Write the reports only");

  try {
    std::vector<std::string> argv = join_negative_values(expand_config(std::move(args)));
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    // Top-level help lists every subcommand's flags.
    out << (parsed.empty() ? app.help("", CLI::AppFormatMode::All) : parsed.front()->help());
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (test->parsed()) {
      return cmd_test(test_args, out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_args, out);
    }
    if (plot->parsed()) {
      return cmd_plot(plot_args, out);
    }
    if (casestudy->parsed()) {
      return cmd_casestudy(case_args, out);
    }
  } catch (const std::invalid_argument& e) {  // includes DataError
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  err << "internal error: no subcommand ran\n";
  return kInternal;
}

}  // namespace cumcal::cli
