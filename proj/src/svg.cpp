#include "cumcal/svg.hpp"

#include <cmath>
#include <cstdio>

namespace cumcal::svg {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string out(buf);
  const auto dot = out.find('.');
  if (dot != std::string::npos) {
    auto last = out.find_last_not_of('0');
    if (last == dot) {
      --last;
    }
    out.erase(last + 1);
  }
  if (out == "-0") {
    out = "0";
  }
  return out;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo) || target < 1) {
    return {lo};
  }
  const double raw = (hi - lo) / target;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * magnitude;
    if (step >= raw) {
      break;
    }
  }
  std::vector<double> ticks;
  for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k += 1.0) {
    const double t = k * step;
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::attributes(const Style& style, std::string_view cls) {
  if (!cls.empty()) {
    body_ << " class=\"" << escape(cls) << '"';
  }
  body_ << " stroke=\"" << escape(style.stroke) << "\" stroke-width=\""
        << format_number(style.stroke_width) << "\" fill=\"" << escape(style.fill) << '"';
  if (style.dashed) {
    body_ << " stroke-dasharray=\"6,4\"";
  }
}

void Document::line(Point a, Point b, const Style& style, std::string_view cls) {
  body_ << "<line x1=\"" << format_number(a.x) << "\" y1=\"" << format_number(a.y) << "\" x2=\""
        << format_number(b.x) << "\" y2=\"" << format_number(b.y) << '"';
  attributes(style, cls);
  body_ << "/>\n";
}

void Document::polyline(std::span<const Point> points, const Style& style, std::string_view cls) {
  body_ << "<polyline points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    body_ << (i ? " " : "") << format_number(points[i].x) << ',' << format_number(points[i].y);
  }
  body_ << '"';
  attributes(style, cls);
  body_ << "/>\n";
}

void Document::polygon(std::span<const Point> points, const Style& style, std::string_view cls) {
  body_ << "<polygon points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    body_ << (i ? " " : "") << format_number(points[i].x) << ',' << format_number(points[i].y);
  }
  body_ << '"';
  attributes(style, cls);
  body_ << "/>\n";
}

void Document::rect(Point corner, double width, double height, const Style& style,
                    std::string_view cls) {
  body_ << "<rect x=\"" << format_number(corner.x) << "\" y=\"" << format_number(corner.y)
        << "\" width=\"" << format_number(width) << "\" height=\"" << format_number(height) << '"';
  attributes(style, cls);
  body_ << "/>\n";
}

void Document::circle(Point center, double radius, const Style& style, std::string_view cls) {
  body_ << "<circle cx=\"" << format_number(center.x) << "\" cy=\"" << format_number(center.y)
        << "\" r=\"" << format_number(radius) << '"';
  attributes(style, cls);
  body_ << "/>\n";
}

void Document::text(Point anchor, std::string_view content, double size, std::string_view align,
                    std::string_view cls, double rotate) {
  body_ << "<text x=\"" << format_number(anchor.x) << "\" y=\"" << format_number(anchor.y)
        << "\" font-family=\"sans-serif\" font-size=\"" << format_number(size)
        << "\" text-anchor=\"" << escape(align) << '"';
  if (!cls.empty()) {
    body_ << " class=\"" << escape(cls) << '"';
  }
  if (rotate != 0.0) {
    body_ << " transform=\"rotate(" << format_number(rotate) << ' ' << format_number(anchor.x)
          << ' ' << format_number(anchor.y) << ")\"";
  }
  body_ << '>' << escape(content) << "</text>\n";
}

void Document::begin_group(std::string_view cls) {
  body_ << "<g class=\"" << escape(cls) << "\">\n";
  ++open_groups_;
}

void Document::end_group() {
  if (open_groups_ > 0) {
    body_ << "</g>\n";
    --open_groups_;
  }
}

std::string Document::str() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << format_number(width_) << "\" height=\"" << format_number(height_) << "\" viewBox=\"0 0 "
      << format_number(width_) << ' ' << format_number(height_) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << format_number(width_) << "\" height=\""
      << format_number(height_) << "\" fill=\"white\"/>\n"
      << body_.str();
  for (int i = 0; i < open_groups_; ++i) {
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cumcal::svg
