#include "cumcal/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cumcal/calibration_tests.hpp"
#include "cumcal/logistic.hpp"
#include "cumcal/parallel.hpp"
#include "cumcal/rng.hpp"

namespace cumcal {

std::string_view family_name(ScenarioFamily family) noexcept {
  switch (family) {
    case ScenarioFamily::Null:
      return "null";
    case ScenarioFamily::LogitLinear:
      return "logit-linear";
    case ScenarioFamily::LogitPower:
      return "logit-power";
  }
  return "unknown";
}

std::optional<ScenarioFamily> parse_family(std::string_view name) noexcept {
  for (auto f : {ScenarioFamily::Null, ScenarioFamily::LogitLinear, ScenarioFamily::LogitPower}) {
    if (family_name(f) == name) {
      return f;
    }
  }
  return std::nullopt;
}

std::string_view test_name(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::LR:
      return "LR";
    case TestKind::HL:
      return "HL";
    case TestKind::BM:
      return "BM";
    case TestKind::BB:
      return "BB";
    case TestKind::BridgeMean:
      return "BB.mean";
    case TestKind::BridgeShape:
      return "BB.bridge";
  }
  return "unknown";
}

std::optional<TestKind> parse_test_name(std::string_view name) noexcept {
  for (const TestKind kind : kAllTestKinds) {
    if (test_name(kind) == name) {
      return kind;
    }
  }
  return std::nullopt;
}

void SimulationScenario::validate() const {
  if (n < 1) {
    throw std::invalid_argument("scenario: n must be at least 1");
  }
  if (replications < 1) {
    throw std::invalid_argument("scenario: replications must be at least 1");
  }
  if (!(b > 0.0)) {
    throw std::invalid_argument("scenario: b must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("scenario: alpha must lie in (0,1)");
  }
}

RawSample generate_raw(const SimulationScenario& scenario, std::uint64_t replicate) {
  scenario.validate();
  Engine engine = make_engine(
      scenario.seed, {static_cast<std::uint64_t>(scenario.family), double_bits(scenario.beta0),
                      double_bits(scenario.a), double_bits(scenario.b), scenario.n, replicate});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  RawSample out;
  out.covariate.resize(scenario.n);
  out.true_risk.resize(scenario.n);
  out.predictions.resize(scenario.n);
  out.outcomes.resize(scenario.n);
  for (std::size_t i = 0; i < scenario.n; ++i) {
    const double x = normal(engine);
    double truth = 0.0;
    double predicted = 0.0;
    switch (scenario.family) {
      case ScenarioFamily::Null:
        truth = predicted = expit(scenario.beta0 + x);
        break;
      case ScenarioFamily::LogitLinear:
        truth = expit(x);
        predicted = expit(scenario.a + scenario.b * x);
        break;
      case ScenarioFamily::LogitPower:
        truth = expit(x);
        predicted = expit(scenario.a +
                          scenario.b * std::copysign(std::pow(std::abs(x), 1.0 / scenario.b), x));
        break;
    }
    out.covariate[i] = x;
    out.true_risk[i] = truth;
    out.predictions[i] = predicted;
    out.outcomes[i] = uniform(engine) < truth ? 1 : 0;
  }
  return out;
}

CalibrationDataset generate_dataset(const SimulationScenario& scenario, std::uint64_t replicate) {
  const RawSample raw = generate_raw(scenario, replicate);
  return build_dataset(raw.predictions, raw.outcomes);
}

const TestTally* SimulationSummary::find(TestKind kind) const noexcept {
  for (const TestTally& tally : tallies) {
    if (tally.kind == kind) {
      return &tally;
    }
  }
  return nullptr;
}

double SimulationSummary::rejection(TestKind kind) const {
  const TestTally* tally = find(kind);
  if (tally == nullptr) {
    throw std::out_of_range("test " + std::string(test_name(kind)) + " was not run");
  }
  return static_cast<double>(tally->rejections) / static_cast<double>(scenario.replications);
}

double SimulationSummary::standard_error(TestKind kind) const {
  const double p = rejection(kind);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(scenario.replications));
}

bool SimulationSummary::same_results(const SimulationSummary& other) const {
  return scenario == other.scenario && tallies == other.tallies &&
         lr_nonconverged == other.lr_nonconverged && hl_degenerate == other.hl_degenerate;
}

namespace {

struct ReplicateOutcome {
  std::array<double, kAllTestKinds.size()> pvalues{};
  bool lr_failed = false;
  bool hl_failed = false;
};

std::size_t slot(TestKind kind) {
  return static_cast<std::size_t>(kind);
}

bool wants(std::span<const TestKind> tests, TestKind kind) {
  return std::find(tests.begin(), tests.end(), kind) != tests.end();
}

ReplicateOutcome run_replicate(const SimulationScenario& scenario, std::uint64_t replicate,
                               std::span<const TestKind> tests) {
  const CalibrationDataset data = generate_dataset(scenario, replicate);
  ReplicateOutcome out;
  out.pvalues.fill(1.0);

  if (wants(tests, TestKind::BM) || wants(tests, TestKind::BB) ||
      wants(tests, TestKind::BridgeMean) || wants(tests, TestKind::BridgeShape)) {
    const WalkStatistics stats = walk_statistics(cumulative_process(data));
    const BridgePValues bridge = bb_p_values(stats.s_n, stats.b_star);
    out.pvalues[slot(TestKind::BM)] = bm_p_value(stats.s_star);
    out.pvalues[slot(TestKind::BB)] = bridge.p_unified;
    out.pvalues[slot(TestKind::BridgeMean)] = bridge.p_a;
    out.pvalues[slot(TestKind::BridgeShape)] = bridge.p_b;
  }
  if (wants(tests, TestKind::LR)) {
    const WeakCalibResult lr = weak_calibration_lr_test(data);
    if (lr.p_value) {
      out.pvalues[slot(TestKind::LR)] = *lr.p_value;
    } else {
      out.lr_failed = true;
    }
  }
  if (wants(tests, TestKind::HL)) {
    try {
      // Predictions are fixed, not fitted to these outcomes: G degrees of freedom.
      out.pvalues[slot(TestKind::HL)] =
          hosmer_lemeshow_test(data, 10, HLDegreesOfFreedom::Groups).p_value;
    } catch (const DegenerateGroupError&) {
      out.hl_failed = true;
    }
  }
  return out;
}

}  // namespace

SimulationSummary run_cell(const SimulationScenario& scenario, std::span<const TestKind> tests,
                           const StudyOptions& options) {
  scenario.validate();
  const auto started = std::chrono::steady_clock::now();

  std::vector<ReplicateOutcome> outcomes(scenario.replications);
  parallel_for(scenario.replications, options.threads, [&](std::size_t r) {
    outcomes[r] = run_replicate(scenario, r, tests);
  });

  SimulationSummary summary;
  summary.scenario = scenario;
  for (const TestKind kind : tests) {
    TestTally tally;
    tally.kind = kind;
    for (const ReplicateOutcome& o : outcomes) {
      const bool failed = (kind == TestKind::LR && o.lr_failed) ||
                          (kind == TestKind::HL && o.hl_failed);
      const double p = o.pvalues[slot(kind)];
      if (!failed && p < scenario.alpha) {
        ++tally.rejections;
      }
      if (options.keep_pvalues && !failed) {
        tally.pvalues.push_back(p);
      }
    }
    summary.tallies.push_back(std::move(tally));
  }
  for (const ReplicateOutcome& o : outcomes) {
    summary.lr_nonconverged += o.lr_failed && wants(tests, TestKind::LR);
    summary.hl_degenerate += o.hl_failed && wants(tests, TestKind::HL);
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

namespace {

void require_nonempty(std::size_t size, const char* what) {
  if (size == 0) {
    throw std::invalid_argument(std::string(what) + " grid is empty");
  }
}

}  // namespace

StudyResult run_null_study(std::span<const double> beta0_grid, std::span<const std::size_t> n_grid,
                           std::size_t replications, std::uint64_t seed, double alpha,
                           const StudyOptions& options) {
  require_nonempty(beta0_grid.size(), "beta0");
  require_nonempty(n_grid.size(), "n");
  static constexpr std::array kTests = {TestKind::BM, TestKind::BB, TestKind::BridgeMean,
                                        TestKind::BridgeShape};

  StudyResult study;
  study.kind = StudyKind::Null;
  study.family = ScenarioFamily::Null;
  study.beta0_grid.assign(beta0_grid.begin(), beta0_grid.end());
  study.n_grid.assign(n_grid.begin(), n_grid.end());
  study.replications = replications;
  study.seed = seed;
  study.alpha = alpha;
  for (const std::size_t n : n_grid) {
    for (const double beta0 : beta0_grid) {
      SimulationScenario scenario;
      scenario.family = ScenarioFamily::Null;
      scenario.beta0 = beta0;
      scenario.n = n;
      scenario.replications = replications;
      scenario.seed = seed;
      scenario.alpha = alpha;
      study.cells.push_back(run_cell(scenario, kTests, options));
    }
  }
  return study;
}

StudyResult run_power_study(ScenarioFamily family, std::span<const double> a_grid,
                            std::span<const double> b_grid, std::span<const std::size_t> n_grid,
                            std::size_t replications, std::uint64_t seed, double alpha,
                            const StudyOptions& options) {
  if (family == ScenarioFamily::Null) {
    throw std::invalid_argument("power studies need a miscalibration family");
  }
  require_nonempty(a_grid.size(), "a");
  require_nonempty(b_grid.size(), "b");
  require_nonempty(n_grid.size(), "n");
  static constexpr std::array kTests = {TestKind::LR, TestKind::HL, TestKind::BM, TestKind::BB};

  StudyResult study;
  study.kind = StudyKind::Power;
  study.family = family;
  study.a_grid.assign(a_grid.begin(), a_grid.end());
  study.b_grid.assign(b_grid.begin(), b_grid.end());
  study.n_grid.assign(n_grid.begin(), n_grid.end());
  study.replications = replications;
  study.seed = seed;
  study.alpha = alpha;
  for (const std::size_t n : n_grid) {
    for (const double b : b_grid) {
      for (const double a : a_grid) {
        SimulationScenario scenario;
        scenario.family = family;
        scenario.a = a;
        scenario.b = b;
        scenario.n = n;
        scenario.replications = replications;
        scenario.seed = seed;
        scenario.alpha = alpha;
        study.cells.push_back(run_cell(scenario, kTests, options));
      }
    }
  }
  return study;
}

std::vector<double> pvalue_ecdf(std::span<const double> pvalues, std::size_t points) {
  if (pvalues.empty()) {
    throw std::invalid_argument("pvalue_ecdf: empty sample");
  }
  if (points < 2) {
    throw std::invalid_argument("pvalue_ecdf: need at least two grid points");
  }
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(points);
  const auto total = static_cast<double>(sorted.size());
  for (std::size_t k = 0; k < points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(points - 1);
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    out[k] = static_cast<double>(count) / total;
  }
  return out;
}

double ecdf_uniform_deviation(std::span<const double> pvalues) {
  if (pvalues.empty()) {
    throw std::invalid_argument("ecdf_uniform_deviation: empty sample");
  }
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  const auto total = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double above = static_cast<double>(i + 1) / total - sorted[i];
    const double below = sorted[i] - static_cast<double>(i) / total;
    worst = std::max({worst, above, below});
  }
  return worst;
}

}  // namespace cumcal
