#pragma once

// SVG figures for calibration assessment.
//
// Cumulative calibration plot: the walk {(t_i, S_i)} from the origin, a
// unit-height triangle at the origin for scale, and the predicted risk on a
// secondary top axis. BM presentation marks sup |S| and the critical band;
// BB presentation draws the chord from (0,0) to (1,S_n), the S_n and B*
// distances, and a critical line parallel to the chord.

#include <string>
#include <vector>

#include "cumcal/calibration_tests.hpp"
#include "cumcal/core.hpp"
#include "cumcal/sim.hpp"
#include "cumcal/svg.hpp"

namespace cumcal {

struct PlotStyle {
  int width = 720;
  int height = 480;
  double significance_level = 0.05;
  bool show_triangle = true;
  bool show_secondary_axis = true;
  std::string walk_color = "#222222";
  std::string bridge_color = "#9e9e9e";
  std::string terminal_color = "#1f77b4";
  std::string statistic_color = "#d62728";
  std::string critical_color = "#d62728";

  void validate() const;
};

enum class CumulativeMode { BM, BB };

inline constexpr double kTriangleBase = 0.1;  // the scale triangle spans t in [0, 0.1]

/// Data-to-pixel transform used by render_cumulative_plot.
svg::Frame cumulative_plot_frame(const CumulativeProcess& process, CumulativeMode mode,
                                 const PlotStyle& style = {});

std::string render_cumulative_plot(const CumulativeProcess& process, const BMTestResult& result,
                                   const PlotStyle& style = {});
std::string render_cumulative_plot(const CumulativeProcess& process, const BBTestResult& result,
                                   const PlotStyle& style = {});

/// Transform used by render_binned_calibration_plot for a given group table.
svg::Frame binned_plot_frame(const std::vector<HLGroup>& groups, const PlotStyle& style = {});

/// Observed event rate against mean prediction per quantile group, with
/// binomial standard-error whiskers and the identity line.
std::string render_binned_calibration_plot(const CalibrationDataset& data, int groups = 10,
                                           const PlotStyle& style = {});

/// Null study: one document, one ECDF panel per cell. Power study: one
/// document per sample size, one bar panel per (a, b) cell.
std::vector<std::string> render_study_figures(const StudyResult& study,
                                              const PlotStyle& style = {});

}  // namespace cumcal
