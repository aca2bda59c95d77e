#include "cumcal/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cumcal/dist.hpp"

namespace cumcal {

using svg::Point;

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 60.0;
constexpr double kMarginBottom = 55.0;
constexpr double kSecondaryLabelGap = 20.0;

const std::array<double, 9> kSecondaryTicks = {0.01, 0.05, 0.1, 0.25, 0.5,
                                               0.75, 0.9,  0.95, 0.99};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string out(buf);
  if (out.starts_with("-") && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

svg::Style stroke(const std::string& color, double width, bool dashed = false) {
  svg::Style s;
  s.stroke = color;
  s.stroke_width = width;
  s.dashed = dashed;
  return s;
}

svg::Style filled(const std::string& color, const std::string& outline = "none") {
  svg::Style s;
  s.fill = color;
  s.stroke = outline;
  return s;
}

svg::Frame frame_for(const PlotStyle& style, double x_lo, double x_hi, double y_lo, double y_hi) {
  svg::Frame frame;
  frame.x = {x_lo, x_hi, kMarginLeft, style.width - kMarginRight};
  frame.y = {y_lo, y_hi, style.height - kMarginBottom, kMarginTop};
  return frame;
}

void draw_axes(svg::Document& doc, const svg::Frame& frame, const std::vector<double>& x_ticks,
               const std::vector<double>& y_ticks, const std::string& x_label,
               const std::string& y_label) {
  doc.begin_group("axes");
  doc.rect({frame.left(), frame.top()}, frame.right() - frame.left(), frame.bottom() - frame.top(),
           stroke("#000000", 1.0), "frame");
  for (const double t : x_ticks) {
    const double px = frame.x.to_pixel(t);
    doc.line({px, frame.bottom()}, {px, frame.bottom() + 5.0}, stroke("#000000", 1.0), "tick");
    doc.text({px, frame.bottom() + 18.0}, general(t), 11.0, "middle", "tick-label");
  }
  for (const double v : y_ticks) {
    const double py = frame.y.to_pixel(v);
    doc.line({frame.left() - 5.0, py}, {frame.left(), py}, stroke("#000000", 1.0), "tick");
    doc.text({frame.left() - 8.0, py + 4.0}, general(v), 11.0, "end", "tick-label");
  }
  doc.text({0.5 * (frame.left() + frame.right()), frame.bottom() + 40.0}, x_label, 12.0, "middle",
           "axis-label");
  const Point y_anchor{18.0, 0.5 * (frame.top() + frame.bottom())};
  doc.text(y_anchor, y_label, 12.0, "middle", "axis-label", -90.0);
  doc.end_group();
}

// Predicted-risk ticks along the top edge. A tick at risk r sits at the time
// of the last observation with prediction <= r.
void draw_secondary_axis(svg::Document& doc, const svg::Frame& frame,
                         const CumulativeProcess& process) {
  const auto p = process.source.predictions();
  doc.begin_group("secondary-axis");
  double last_label = -1e9;
  for (const double tick : kSecondaryTicks) {
    if (tick < p.front() || tick > p.back()) {
      continue;
    }
    const auto index = static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), tick) -
                                                p.begin()) - 1;
    const double px = frame.x.to_pixel(process.times[index]);
    doc.line({px, frame.top()}, {px, frame.top() - 5.0}, stroke("#000000", 1.0), "tick");
    if (px - last_label >= kSecondaryLabelGap) {
      doc.text({px, frame.top() - 9.0}, general(tick), 11.0, "middle", "tick-label");
      last_label = px;
    }
  }
  doc.text({0.5 * (frame.left() + frame.right()), frame.top() - 28.0}, "predicted risk", 12.0,
           "middle", "axis-label");
  doc.end_group();
}

std::vector<Point> walk_points(const CumulativeProcess& process, const svg::Frame& frame) {
  std::vector<Point> points;
  points.reserve(process.size() + 1);
  points.push_back(frame.to_pixel({0.0, 0.0}));
  for (std::size_t i = 0; i < process.size(); ++i) {
    points.push_back(frame.to_pixel({process.times[i], process.walk[i]}));
  }
  return points;
}

void draw_walk_common(svg::Document& doc, const svg::Frame& frame,
                      const CumulativeProcess& process, const PlotStyle& style) {
  draw_axes(doc, frame, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0},
            svg::nice_ticks(frame.y.data_lo, frame.y.data_hi),
            "t (standardized cumulative variance)", "S (standardized cumulative error)");
  if (style.show_secondary_axis) {
    draw_secondary_axis(doc, frame, process);
  }
  doc.line(frame.to_pixel({0.0, 0.0}), frame.to_pixel({1.0, 0.0}), stroke("#cccccc", 1.0),
           "zero");
  if (style.show_triangle) {
    const std::array<Point, 3> triangle = {frame.to_pixel({0.0, 1.0}),
                                           frame.to_pixel({kTriangleBase, 0.0}),
                                           frame.to_pixel({0.0, -1.0})};
    svg::Style s = filled("#eeeeee", "#999999");
    doc.polygon(triangle, s, "triangle");
  }
  const std::vector<Point> points = walk_points(process, frame);
  doc.polyline(points, stroke(style.walk_color, 1.2), "walk");
}

void require_matching(bool ok) {
  if (!ok) {
    throw std::invalid_argument("test result does not belong to this cumulative process");
  }
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

double bm_critical(const PlotStyle& style) {
  return critical_value(SupDistribution::SupAbsBM, 1.0 - style.significance_level);
}

double bb_critical(const PlotStyle& style) {
  return critical_value(SupDistribution::Kolmogorov, 1.0 - style.significance_level);
}

double terminal_critical(const PlotStyle& style) {
  return std_normal_quantile(1.0 - 0.5 * style.significance_level);
}

}  // namespace

void PlotStyle::validate() const {
  if (width <= 0 || height <= 0 || width <= kMarginLeft + kMarginRight ||
      height <= kMarginTop + kMarginBottom) {
    throw std::invalid_argument("plot dimensions too small");
  }
  if (!(significance_level > 0.0 && significance_level < 1.0)) {
    throw std::invalid_argument("significance level must lie in (0,1)");
  }
}

svg::Frame cumulative_plot_frame(const CumulativeProcess& process, CumulativeMode mode,
                                 const PlotStyle& style) {
  style.validate();
  if (process.size() == 0) {
    throw std::invalid_argument("empty cumulative process");
  }
  const auto [lo_it, hi_it] = std::minmax_element(process.walk.begin(), process.walk.end());
  double lo = std::min(0.0, *lo_it);
  double hi = std::max(0.0, *hi_it);
  if (style.show_triangle) {
    lo = std::min(lo, -1.0);
    hi = std::max(hi, 1.0);
  }
  if (mode == CumulativeMode::BM) {
    const double c = bm_critical(style);
    lo = std::min(lo, -c);
    hi = std::max(hi, c);
  } else {
    const double c = bb_critical(style);
    const double z = terminal_critical(style);
    const double s_n = process.walk.back();
    lo = std::min({lo, -c, s_n - c, -z});
    hi = std::max({hi, c, s_n + c, z});
  }
  const double pad = 0.06 * (hi - lo);
  return frame_for(style, 0.0, 1.0, lo - pad, hi + pad);
}

std::string render_cumulative_plot(const CumulativeProcess& process, const BMTestResult& result,
                                   const PlotStyle& style) {
  const WalkStatistics stats = walk_statistics(process);
  require_matching(result.location.index == stats.argmax_bm.index &&
                   close(result.s_star, stats.s_star));
  const svg::Frame frame = cumulative_plot_frame(process, CumulativeMode::BM, style);
  svg::Document doc(style.width, style.height);
  draw_walk_common(doc, frame, process, style);

  const double c = bm_critical(style);
  doc.begin_group("critical");
  for (const double level : {c, -c}) {
    doc.line(frame.to_pixel({0.0, level}), frame.to_pixel({1.0, level}),
             stroke(style.critical_color, 1.0, true), "critical");
  }
  doc.end_group();

  const double t = stats.argmax_bm.time;
  const double s = process.walk[stats.argmax_bm.index];
  doc.line(frame.to_pixel({t, 0.0}), frame.to_pixel({t, s}), stroke(style.statistic_color, 2.0),
           "statistic");

  const std::string caption = "S* = " + fixed(result.s_star, 4) + "  p = " +
                              fixed(result.p_value, 4) + "  C* = " + fixed(result.c_star, 4) +
                              "  at predicted risk " + fixed(result.location.prediction, 3);
  doc.text({frame.left(), style.height - 4.0}, caption, 11.0, "start", "caption");
  return doc.str();
}

std::string render_cumulative_plot(const CumulativeProcess& process, const BBTestResult& result,
                                   const PlotStyle& style) {
  const WalkStatistics stats = walk_statistics(process);
  require_matching(result.location_bridge.index == stats.argmax_bb.index &&
                   close(result.b_star, stats.b_star) && close(result.s_n, stats.s_n));
  const svg::Frame frame = cumulative_plot_frame(process, CumulativeMode::BB, style);
  svg::Document doc(style.width, style.height);
  draw_walk_common(doc, frame, process, style);

  const double s_n = stats.s_n;
  doc.line(frame.to_pixel({0.0, 0.0}), frame.to_pixel({1.0, s_n}),
           stroke(style.bridge_color, 1.5), "bridge");

  const std::size_t k = stats.argmax_bb.index;
  const double t = process.times[k];
  const double s = process.walk[k];
  const double side = (s - t * s_n) < 0.0 ? -1.0 : 1.0;
  const double c = bb_critical(style);
  const double z = terminal_critical(style);
  doc.begin_group("critical");
  doc.line(frame.to_pixel({0.0, side * c}), frame.to_pixel({1.0, s_n + side * c}),
           stroke(style.critical_color, 1.0, true), "critical");
  for (const double level : {z, -z}) {
    doc.line(frame.to_pixel({0.95, level}), frame.to_pixel({1.0, level}),
             stroke(style.terminal_color, 1.0, true), "critical-terminal");
  }
  doc.end_group();

  doc.line(frame.to_pixel({1.0, 0.0}), frame.to_pixel({1.0, s_n}),
           stroke(style.terminal_color, 2.0), "terminal");
  doc.line(frame.to_pixel({t, t * s_n}), frame.to_pixel({t, s}),
           stroke(style.statistic_color, 2.0), "statistic");

  const std::string caption = "S_n = " + fixed(result.s_n, 4) + " (p = " + fixed(result.p_a, 4) +
                              ")  B* = " + fixed(result.b_star, 4) + " (p = " +
                              fixed(result.p_b, 4) + ")  unified p = " +
                              fixed(result.p_unified, 4);
  doc.text({frame.left(), style.height - 4.0}, caption, 11.0, "start", "caption");
  return doc.str();
}

svg::Frame binned_plot_frame(const std::vector<HLGroup>& groups, const PlotStyle& style) {
  style.validate();
  double top = 0.0;
  for (const HLGroup& g : groups) {
    const double rate = g.observed / static_cast<double>(g.size);
    const double whisker = std::sqrt(rate * (1.0 - rate) / static_cast<double>(g.size));
    top = std::max({top, g.mean_prediction, rate + whisker});
  }
  const double upper = std::clamp(std::ceil(top * 10.0 - 1e-9) / 10.0, 0.1, 1.0);
  return frame_for(style, 0.0, upper, 0.0, upper);
}

std::string render_binned_calibration_plot(const CalibrationDataset& data, int groups,
                                           const PlotStyle& style) {
  const std::vector<HLGroup> table = quantile_groups(data, groups);
  const svg::Frame frame = binned_plot_frame(table, style);
  svg::Document doc(style.width, style.height);
  const std::vector<double> ticks = svg::nice_ticks(0.0, frame.x.data_hi, 5);
  draw_axes(doc, frame, ticks, ticks, "mean predicted risk", "observed event rate");
  doc.line(frame.to_pixel({0.0, 0.0}), frame.to_pixel({frame.x.data_hi, frame.y.data_hi}),
           stroke("#9e9e9e", 1.0), "identity");

  doc.begin_group("groups");
  for (const HLGroup& g : table) {
    const double rate = g.observed / static_cast<double>(g.size);
    const double whisker = std::sqrt(rate * (1.0 - rate) / static_cast<double>(g.size));
    doc.line(frame.to_pixel({g.mean_prediction, std::max(0.0, rate - whisker)}),
             frame.to_pixel({g.mean_prediction, rate + whisker}), stroke("#444444", 1.0),
             "whisker");
    doc.circle(frame.to_pixel({g.mean_prediction, rate}), 3.5, filled("#1f77b4", "#000000"),
               "group");
  }
  doc.end_group();
  return doc.str();
}

namespace {

constexpr double kPanelWidth = 240.0;
constexpr double kPanelHeight = 200.0;
constexpr double kPanelInset = 36.0;
constexpr double kHeader = 40.0;

const std::string kBMColor = "#1f77b4";
const std::string kBBColor = "#ff7f0e";

svg::Frame panel_frame(std::size_t row, std::size_t col) {
  const double left = static_cast<double>(col) * kPanelWidth + kPanelInset;
  const double top = kHeader + static_cast<double>(row) * kPanelHeight + 22.0;
  svg::Frame frame;
  frame.x = {0.0, 1.0, left, left + kPanelWidth - kPanelInset - 10.0};
  frame.y = {0.0, 1.0, top + kPanelHeight - kPanelInset - 22.0, top};
  return frame;
}

void panel_box(svg::Document& doc, const svg::Frame& frame, const std::string& title) {
  doc.rect({frame.left(), frame.top()}, frame.right() - frame.left(),
           frame.bottom() - frame.top(), stroke("#000000", 1.0), "frame");
  doc.text({0.5 * (frame.left() + frame.right()), frame.top() - 6.0}, title, 11.0, "middle",
           "panel-title");
  for (const double v : {0.0, 0.5, 1.0}) {
    doc.text({frame.x.to_pixel(v), frame.bottom() + 13.0}, general(v), 9.0, "middle",
             "tick-label");
    doc.text({frame.left() - 4.0, frame.y.to_pixel(v) + 3.0}, general(v), 9.0, "end",
             "tick-label");
  }
}

std::string render_null_figure(const StudyResult& study) {
  const std::size_t cols = study.beta0_grid.size();
  const std::size_t rows = study.n_grid.size();
  svg::Document doc(static_cast<double>(cols) * kPanelWidth + 10.0,
                    kHeader + static_cast<double>(rows) * kPanelHeight + 10.0);
  doc.text({10.0, 22.0}, "Null p-value ECDF (blue BM, orange BB); proportion below " +
                             general(study.alpha),
           13.0, "start", "figure-title");

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const SimulationSummary& cell = study.cells[r * cols + c];
      const svg::Frame frame = panel_frame(r, c);
      doc.begin_group("panel");
      panel_box(doc, frame,
                "beta0 = " + general(cell.scenario.beta0) + ", n = " +
                    std::to_string(cell.scenario.n));
      doc.line(frame.to_pixel({0.0, 0.0}), frame.to_pixel({1.0, 1.0}), stroke("#9e9e9e", 1.0),
               "identity");
      double text_y = frame.top() + 14.0;
      for (const auto& [kind, color] :
           {std::pair{TestKind::BM, kBMColor}, std::pair{TestKind::BB, kBBColor}}) {
        const TestTally* tally = cell.find(kind);
        if (tally == nullptr) {
          continue;
        }
        if (!tally->pvalues.empty()) {
          const std::vector<double> ecdf = pvalue_ecdf(tally->pvalues);
          std::vector<Point> points(ecdf.size());
          for (std::size_t k = 0; k < ecdf.size(); ++k) {
            const double x = static_cast<double>(k) / static_cast<double>(ecdf.size() - 1);
            points[k] = frame.to_pixel({x, ecdf[k]});
          }
          doc.polyline(points, stroke(color, 1.2), "ecdf");
        }
        doc.text({frame.left() + 6.0, text_y},
                 std::string(test_name(kind)) + " " + fixed(cell.rejection(kind), 3), 10.0,
                 "start", "rejection");
        text_y += 13.0;
      }
      doc.end_group();
    }
  }
  return doc.str();
}

std::string render_power_figure(const StudyResult& study, std::size_t n_index) {
  const std::size_t cols = study.a_grid.size();
  const std::size_t rows = study.b_grid.size();
  const std::size_t per_n = rows * cols;
  svg::Document doc(static_cast<double>(cols) * kPanelWidth + 10.0,
                    kHeader + static_cast<double>(rows) * kPanelHeight + 10.0);
  doc.text({10.0, 22.0},
           "Rejection rate, " + std::string(family_name(study.family)) + ", n = " +
               std::to_string(study.n_grid[n_index]) + " (LR white, HL gray, BM blue, BB orange)",
           13.0, "start", "figure-title");

  static const std::array<std::pair<TestKind, const char*>, 4> kBars = {
      std::pair{TestKind::LR, "#ffffff"}, std::pair{TestKind::HL, "#9e9e9e"},
      std::pair{TestKind::BM, "#1f77b4"}, std::pair{TestKind::BB, "#ff7f0e"}};

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const SimulationSummary& cell = study.cells[n_index * per_n + r * cols + c];
      const svg::Frame frame = panel_frame(r, c);
      doc.begin_group("panel");
      panel_box(doc, frame,
                "a = " + general(cell.scenario.a) + ", b = " + general(cell.scenario.b));
      doc.line(frame.to_pixel({0.0, study.alpha}), frame.to_pixel({1.0, study.alpha}),
               stroke("#d62728", 1.0, true), "alpha");
      const double slot = 1.0 / static_cast<double>(kBars.size());
      for (std::size_t k = 0; k < kBars.size(); ++k) {
        const TestTally* tally = cell.find(kBars[k].first);
        if (tally == nullptr) {
          continue;
        }
        const double rate = cell.rejection(kBars[k].first);
        const Point top_left = frame.to_pixel({(k + 0.15) * slot, rate});
        const Point bottom_right = frame.to_pixel({(k + 0.85) * slot, 0.0});
        doc.rect(top_left, bottom_right.x - top_left.x, bottom_right.y - top_left.y,
                 filled(kBars[k].second, "#000000"), "bar");
        doc.text({0.5 * (top_left.x + bottom_right.x), top_left.y - 3.0}, fixed(rate, 3), 8.0,
                 "middle", "rejection");
      }
      doc.end_group();
    }
  }
  return doc.str();
}

}  // namespace

std::vector<std::string> render_study_figures(const StudyResult& study, const PlotStyle& style) {
  style.validate();
  if (study.cells.empty()) {
    throw std::invalid_argument("empty study grid");
  }
  if (study.kind == StudyKind::Null) {
    if (study.cells.size() != study.beta0_grid.size() * study.n_grid.size()) {
      throw std::invalid_argument("null study grid does not match its cells");
    }
    return {render_null_figure(study)};
  }
  if (study.cells.size() != study.a_grid.size() * study.b_grid.size() * study.n_grid.size()) {
    throw std::invalid_argument("power study grid does not match its cells");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < study.n_grid.size(); ++i) {
    out.push_back(render_power_figure(study, i));
  }
  return out;
}

}  // namespace cumcal
