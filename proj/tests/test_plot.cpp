#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cumcal/dist.hpp"
#include "cumcal/plot.hpp"
#include "cumcal/sim.hpp"

using namespace cumcal;
namespace pt = boost::property_tree;

namespace {

struct Element {
  std::string tag;
  pt::ptree node;

  std::string attr(const std::string& name) const {
    return node.get<std::string>("<xmlattr>." + name, "");
  }
  double number(const std::string& name) const { return std::stod(attr(name)); }
  std::string cls() const { return attr("class"); }
};

void collect(const pt::ptree& tree, std::vector<Element>& out) {
  for (const auto& [name, child] : tree) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") {
      continue;
    }
    out.push_back({name, child});
    collect(child, out);
  }
}

// Parses the document (throws on malformed XML) and flattens its elements.
std::vector<Element> parse_svg(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  REQUIRE(tree.count("svg") == 1);
  std::vector<Element> out;
  collect(tree.get_child("svg"), out);
  return out;
}

std::vector<Element> with_class(const std::vector<Element>& all, const std::string& cls) {
  std::vector<Element> out;
  for (const Element& e : all) {
    if (e.cls() == cls) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<svg::Point> polyline_points(const Element& e) {
  std::vector<svg::Point> out;
  std::istringstream in(e.attr("points"));
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    out.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
  }
  return out;
}

CalibrationDataset sample(ScenarioFamily family, double a, double b, std::size_t n,
                          std::uint64_t replicate = 0) {
  SimulationScenario s;
  s.family = family;
  s.a = a;
  s.b = b;
  s.n = n;
  s.seed = 13;
  return generate_dataset(s, replicate);
}

// Small-development-model shape: predictions too extreme at both ends.
CalibrationDataset overfit_sample() {
  return sample(ScenarioFamily::LogitLinear, 0.0, 1.6, 1500);
}

}  // namespace

TEST_CASE("cumulative plots are well-formed with one walk polyline of n + 1 vertices") {
  for (const std::size_t n : {1u, 2u, 17u, 400u}) {
    const CalibrationDataset data = sample(ScenarioFamily::Null, 0.0, 1.0, n, n);
    const CumulativeProcess process = cumulative_process(data);
    for (const std::string& doc :
         {render_cumulative_plot(process, bm_test(process)),
          render_cumulative_plot(process, bb_test(process))}) {
      const std::vector<Element> all = parse_svg(doc);
      const std::vector<Element> walks = with_class(all, "walk");
      REQUIRE(walks.size() == 1);
      CHECK(walks[0].tag == "polyline");
      CHECK(polyline_points(walks[0]).size() == n + 1);
      CHECK(doc.find("href") == std::string::npos);
      CHECK(with_class(all, "triangle").size() == 1);
    }
  }
}

TEST_CASE("walk vertices round-trip through the frame transform") {
  const CalibrationDataset data = overfit_sample();
  const CumulativeProcess process = cumulative_process(data);
  const BMTestResult bm = bm_test(process);
  const svg::Frame frame = cumulative_plot_frame(process, CumulativeMode::BM);
  const std::vector<Element> all = parse_svg(render_cumulative_plot(process, bm));
  const std::vector<svg::Point> pts = polyline_points(with_class(all, "walk")[0]);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const svg::Point data_point =
        i == 0 ? svg::Point{0.0, 0.0} : svg::Point{process.times[i - 1], process.walk[i - 1]};
    const svg::Point px = frame.to_pixel(data_point);
    worst = std::max({worst, std::abs(px.x - pts[i].x), std::abs(px.y - pts[i].y)});
    const svg::Point back = frame.to_pixel(frame.to_data(px));
    CHECK(std::abs(back.x - px.x) < 1e-6);
    CHECK(std::abs(back.y - px.y) < 1e-6);
  }
  // Printed with six decimals: at most half a unit in the last place.
  CHECK(worst < 1e-6);
}

TEST_CASE("BM presentation marks the maximum and the critical band") {
  const CalibrationDataset data = overfit_sample();
  const CumulativeProcess process = cumulative_process(data);
  const BMTestResult bm = bm_test(process);
  const WalkStatistics stats = walk_statistics(process);
  const svg::Frame frame = cumulative_plot_frame(process, CumulativeMode::BM);
  const std::vector<Element> all = parse_svg(render_cumulative_plot(process, bm));

  const std::vector<Element> marker = with_class(all, "statistic");
  REQUIRE(marker.size() == 1);
  const svg::Point top = frame.to_data({marker[0].number("x2"), marker[0].number("y2")});
  const svg::Point base = frame.to_data({marker[0].number("x1"), marker[0].number("y1")});
  // Rendered extremum against the statistics, to half a pixel.
  const double half_px_t = 0.5 / (frame.right() - frame.left());
  const double half_px_s = 0.5 * (frame.y.data_hi - frame.y.data_lo) / (frame.bottom() - frame.top());
  CHECK(std::abs(top.x - stats.argmax_bm.time) < half_px_t);
  CHECK(std::abs(std::abs(top.y) - stats.s_star) < half_px_s);
  CHECK(std::abs(base.y) < half_px_s);

  const double c = critical_value(SupDistribution::SupAbsBM, 0.95);
  const std::vector<Element> critical = with_class(all, "critical");
  std::vector<double> levels;
  for (const Element& e : critical) {
    if (e.tag == "line") {
      CHECK(e.attr("stroke-dasharray") != "");
      CHECK(e.number("y1") == e.number("y2"));
      levels.push_back(frame.y.to_data(e.number("y1")));
    }
  }
  REQUIRE(levels.size() == 2);
  CHECK(std::abs(std::max(levels[0], levels[1]) - c) < 1e-6);
  CHECK(std::abs(std::min(levels[0], levels[1]) + c) < 1e-6);
}

TEST_CASE("BB presentation: chord, terminal and bridged maximum") {
  SUBCASE("general walk") {
    const CalibrationDataset data = sample(ScenarioFamily::LogitLinear, 0.2, 1.0, 800);
    const CumulativeProcess process = cumulative_process(data);
    const BBTestResult bb = bb_test(process);
    const svg::Frame frame = cumulative_plot_frame(process, CumulativeMode::BB);
    const std::vector<Element> all = parse_svg(render_cumulative_plot(process, bb));
    const Element chord = with_class(all, "bridge").at(0);
    const svg::Point end = frame.to_data({chord.number("x2"), chord.number("y2")});
    CHECK(std::abs(end.x - 1.0) < 1e-6);
    CHECK(std::abs(end.y - bb.s_n) < 1e-6);
    const Element terminal = with_class(all, "terminal").at(0);
    const double length = std::abs(frame.y.to_data(terminal.number("y2")) -
                                   frame.y.to_data(terminal.number("y1")));
    CHECK(std::abs(length - std::abs(bb.s_n)) < 1e-6);
    const Element marker = with_class(all, "statistic").at(0);
    const double b_len = std::abs(frame.y.to_data(marker.number("y2")) -
                                  frame.y.to_data(marker.number("y1")));
    CHECK(std::abs(b_len - bb.b_star) < 1e-6);
    // Critical line parallel to the chord at the Kolmogorov quantile.
    const double c = critical_value(SupDistribution::Kolmogorov, 0.95);
    for (const Element& e : with_class(all, "critical")) {
      if (e.tag != "line") {
        continue;
      }
      const svg::Point p1 = frame.to_data({e.number("x1"), e.number("y1")});
      const svg::Point p2 = frame.to_data({e.number("x2"), e.number("y2")});
      CHECK(std::abs((p2.y - p1.y) - bb.s_n) < 1e-6);
      CHECK(std::abs(std::abs(p1.y) - c) < 1e-6);
    }
  }
  SUBCASE("zero terminal value puts the chord on the t axis") {
    const CalibrationDataset data = build_dataset(
        std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 1, 0, 0, 0, 1});
    const CumulativeProcess process = cumulative_process(data);
    const BBTestResult bb = bb_test(process);
    REQUIRE(bb.s_n == 0.0);
    const svg::Frame frame = cumulative_plot_frame(process, CumulativeMode::BB);
    const std::vector<Element> all = parse_svg(render_cumulative_plot(process, bb));
    const Element chord = with_class(all, "bridge").at(0);
    const double axis = frame.y.to_pixel(0.0);
    CHECK(std::abs(chord.number("y1") - axis) < 1e-6);
    CHECK(std::abs(chord.number("y2") - axis) < 1e-6);
    const Element marker = with_class(all, "statistic").at(0);
    const double b_len = std::abs(frame.y.to_data(marker.number("y2")) -
                                  frame.y.to_data(marker.number("y1")));
    CHECK(std::abs(b_len - bb.b_star) < 1e-6);
  }
}

TEST_CASE("mismatched result and process are rejected") {
  const CumulativeProcess first = cumulative_process(sample(ScenarioFamily::Null, 0, 1, 300, 1));
  const CumulativeProcess second = cumulative_process(sample(ScenarioFamily::Null, 0, 1, 300, 2));
  CHECK_THROWS_AS(render_cumulative_plot(first, bm_test(second)), std::invalid_argument);
  CHECK_THROWS_AS(render_cumulative_plot(first, bb_test(second)), std::invalid_argument);
  PlotStyle bad;
  bad.significance_level = 0.0;
  CHECK_THROWS_AS(render_cumulative_plot(first, bm_test(first), bad), std::invalid_argument);
}

TEST_CASE("rendering is deterministic") {
  const CumulativeProcess process = cumulative_process(overfit_sample());
  CHECK(render_cumulative_plot(process, bm_test(process)) ==
        render_cumulative_plot(process, bm_test(process)));
  CHECK(render_cumulative_plot(process, bb_test(process)) ==
        render_cumulative_plot(process, bb_test(process)));
  CHECK(render_binned_calibration_plot(process.source) ==
        render_binned_calibration_plot(process.source));
}

TEST_CASE("binned calibration plot") {
  const CalibrationDataset data = sample(ScenarioFamily::LogitLinear, -0.1, 1.3, 1000);
  const std::vector<HLGroup> table = quantile_groups(data, 10);
  const svg::Frame frame = binned_plot_frame(table);
  const std::vector<Element> all = parse_svg(render_binned_calibration_plot(data, 10));
  const std::vector<Element> markers = with_class(all, "group");
  const std::vector<Element> whiskers = with_class(all, "whisker");
  REQUIRE(markers.size() == 10);
  REQUIRE(whiskers.size() == 10);

  // Independent tally of the deciles from the sorted predictions.
  const auto p = data.predictions();
  const auto y = data.outcomes();
  for (std::size_t g = 0; g < 10; ++g) {
    double sum_p = 0;
    double events = 0;
    for (std::size_t i = g * 100; i < (g + 1) * 100; ++i) {
      sum_p += p[i];
      events += y[i];
    }
    const double rate = events / 100.0;
    const svg::Point centre =
        frame.to_data({markers[g].number("cx"), markers[g].number("cy")});
    CHECK(std::abs(centre.x - sum_p / 100.0) < 1e-6);
    CHECK(std::abs(centre.y - rate) < 1e-6);
    const double upper = frame.y.to_data(whiskers[g].number("y2"));
    CHECK(std::abs(upper - rate - std::sqrt(rate * (1 - rate) / 100.0)) < 1e-6);
  }
  CHECK_THROWS_AS(render_binned_calibration_plot(sample(ScenarioFamily::Null, 0, 1, 5), 10),
                  std::invalid_argument);
}

TEST_CASE("points of a perfectly grouped dataset lie on the identity line") {
  // Two groups whose event rates equal their mean predictions.
  const std::vector<double> p{0.25, 0.25, 0.25, 0.25, 0.75, 0.75, 0.75, 0.75};
  const std::vector<int> y{1, 0, 0, 0, 1, 1, 1, 0};
  const CalibrationDataset data = build_dataset(p, y);
  const std::vector<HLGroup> table = quantile_groups(data, 2);
  const svg::Frame frame = binned_plot_frame(table);
  for (const Element& m : with_class(parse_svg(render_binned_calibration_plot(data, 2)), "group")) {
    const svg::Point c = frame.to_data({m.number("cx"), m.number("cy")});
    CHECK(std::abs(c.x - c.y) < 1e-6);
  }
}

TEST_CASE("study figures") {
  SUBCASE("3 x 4 null grid gives 12 panels with matching annotations") {
    const std::vector<double> beta0{-2.0, -1.0, 0.0};
    const std::vector<std::size_t> n{30, 50, 80, 120};
    const StudyResult study = run_null_study(beta0, n, 40, 3);
    const std::vector<std::string> docs = render_study_figures(study);
    REQUIRE(docs.size() == 1);
    const std::vector<Element> all = parse_svg(docs[0]);
    CHECK(with_class(all, "panel").size() == 12);
    CHECK(with_class(all, "ecdf").size() == 24);
    const std::vector<Element> labels = with_class(all, "rejection");
    REQUIRE(labels.size() == 24);
    for (std::size_t c = 0; c < 12; ++c) {
      for (std::size_t k = 0; k < 2; ++k) {
        const std::string text = labels[2 * c + k].node.data();
        const double shown = std::stod(text.substr(text.find(' ') + 1));
        const double rate = study.cells[c].rejection(k == 0 ? TestKind::BM : TestKind::BB);
        CHECK(std::abs(shown - rate) < 5e-4 + 1e-12);
      }
    }
  }
  SUBCASE("single power cell gives one panel with four bars") {
    const std::vector<double> a{0.0};
    const std::vector<double> b{1.0};
    const std::vector<std::size_t> n{100};
    const StudyResult study = run_power_study(ScenarioFamily::LogitPower, a, b, n, 30, 2);
    const std::vector<std::string> docs = render_study_figures(study);
    REQUIRE(docs.size() == 1);
    const std::vector<Element> all = parse_svg(docs[0]);
    CHECK(with_class(all, "panel").size() == 1);
    const std::vector<Element> bars = with_class(all, "bar");
    REQUIRE(bars.size() == 4);
    const std::vector<Element> labels = with_class(all, "rejection");
    REQUIRE(labels.size() == 4);
    const TestKind order[] = {TestKind::LR, TestKind::HL, TestKind::BM, TestKind::BB};
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(std::stod(labels[k].node.data()) - study.cells[0].rejection(order[k])) <
            5e-4 + 1e-12);
    }
  }
  SUBCASE("power study renders one document per sample size") {
    const std::vector<double> a{-0.25, 0.25};
    const std::vector<double> b{0.5, 2.0};
    const std::vector<std::size_t> n{40, 60};
    const StudyResult study = run_power_study(ScenarioFamily::LogitLinear, a, b, n, 10, 2);
    const std::vector<std::string> docs = render_study_figures(study);
    REQUIRE(docs.size() == 2);
    for (const std::string& d : docs) {
      CHECK(with_class(parse_svg(d), "panel").size() == 4);
    }
    CHECK(docs == render_study_figures(study));
  }
  SUBCASE("empty grid") {
    StudyResult empty;
    CHECK_THROWS_AS(render_study_figures(empty), std::invalid_argument);
  }
}

TEST_CASE("svg writer") {
  CHECK(svg::format_number(1.0) == "1");
  CHECK(svg::format_number(-0.5) == "-0.5");
  CHECK(svg::format_number(1.23456789) == "1.234568");
  CHECK(svg::format_number(-0.0000001) == "0");
  CHECK(svg::escape("a<b & \"c\"") == "a&lt;b &amp; &quot;c&quot;");
  const std::vector<double> ticks = svg::nice_ticks(-2.3, 3.1);
  CHECK(ticks.front() <= -2.0);
  CHECK(ticks.back() >= 3.0);
  svg::Document doc(10, 10);
  doc.begin_group("outer");
  doc.text({1, 1}, "x < y", 10);
  const std::vector<Element> all = parse_svg(doc.str());
  CHECK(with_class(all, "outer").size() == 1);
}
