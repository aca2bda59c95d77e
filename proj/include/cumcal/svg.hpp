#pragma once

// Minimal deterministic SVG 1.1 writer. Coordinates are printed in fixed
// notation with six decimals (trailing zeros trimmed), so identical input
// always yields byte-identical output.

#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace cumcal::svg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Affine map between a data interval and a pixel interval; pixel_hi may be
/// below pixel_lo (SVG y grows downward).
struct LinearMap {
  double data_lo = 0.0;
  double data_hi = 1.0;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double to_pixel(double v) const noexcept {
    return pixel_lo + (v - data_lo) * (pixel_hi - pixel_lo) / (data_hi - data_lo);
  }
  double to_data(double px) const noexcept {
    return data_lo + (px - pixel_lo) * (data_hi - data_lo) / (pixel_hi - pixel_lo);
  }
};

/// Plot area with its data-to-pixel transform.
struct Frame {
  LinearMap x;
  LinearMap y;

  Point to_pixel(Point p) const noexcept { return {x.to_pixel(p.x), y.to_pixel(p.y)}; }
  Point to_data(Point p) const noexcept { return {x.to_data(p.x), y.to_data(p.y)}; }
  double left() const noexcept { return x.pixel_lo; }
  double right() const noexcept { return x.pixel_hi; }
  double top() const noexcept { return y.pixel_hi; }
  double bottom() const noexcept { return y.pixel_lo; }
};

struct Style {
  std::string stroke = "none";
  double stroke_width = 1.0;
  std::string fill = "none";
  bool dashed = false;
};

std::string format_number(double v);
std::string escape(std::string_view text);

/// Roughly `target` evenly spaced round values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

class Document {
 public:
  Document(double width, double height);

  void line(Point a, Point b, const Style& style, std::string_view cls = {});
  void polyline(std::span<const Point> points, const Style& style, std::string_view cls = {});
  void polygon(std::span<const Point> points, const Style& style, std::string_view cls = {});
  void rect(Point corner, double width, double height, const Style& style,
            std::string_view cls = {});
  void circle(Point center, double radius, const Style& style, std::string_view cls = {});
  void text(Point anchor, std::string_view content, double size,
            std::string_view align = "start", std::string_view cls = {}, double rotate = 0.0);
  void begin_group(std::string_view cls);
  void end_group();

  /// The finished document. Open groups are closed.
  std::string str() const;

 private:
  void attributes(const Style& style, std::string_view cls);

  double width_;
  double height_;
  int open_groups_ = 0;
  std::ostringstream body_;
};

}  // namespace cumcal::svg
