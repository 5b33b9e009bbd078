#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "spreach/contour.hpp"

namespace spreach {

/// Minimal deterministic SVG scene for contour and trajectory figures.
/// Fixed canvas, fixed styling, fixed 2-decimal pixel coordinates: the same
/// scene always renders byte-identical output. Self-contained (no external
/// assets).
class SvgCanvas {
 public:
  SvgCanvas(double x_min, double x_max, double y_min, double y_max,
            std::string x_label = "", std::string y_label = "")
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max),
        x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void add_polyline(const std::vector<std::array<double, 2>>& pts, const std::string& color,
                    double width = 1.5, const std::string& dash = "", bool closed = false) {
    if (pts.size() < 2) return;
    std::string d = "M " + px(pts[0][0]) + " " + py(pts[0][1]);
    for (std::size_t i = 1; i < pts.size(); ++i)
      d += " L " + px(pts[i][0]) + " " + py(pts[i][1]);
    if (closed) d += " Z";
    body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             num(width) + "\"";
    if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
    body_ += "/>\n";
  }

  void add_contours(const std::vector<Polyline>& lines, const std::string& color,
                    double width = 1.5, const std::string& dash = "") {
    for (const auto& pl : lines) add_polyline(pl.pts, color, width, dash, pl.closed);
  }

  void add_rect(double x0, double y0, double x1, double y1, const std::string& color,
                double width = 1.5, const std::string& dash = "") {
    add_polyline({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}, color, width, dash, true);
  }

  void add_vline(double x, const std::string& color, double width = 1.5,
                 const std::string& dash = "") {
    add_polyline({{x, y_min_}, {x, y_max_}}, color, width, dash);
  }

  /// Start marker: open circle. End marker: cross.
  void add_circle_marker(double x, double y, const std::string& color, double r = 5.0) {
    body_ += "<circle cx=\"" + px(x) + "\" cy=\"" + py(y) + "\" r=\"" + num(r) +
             "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
  }
  void add_cross_marker(double x, double y, const std::string& color, double r = 5.0) {
    const double cx = sx(x), cy = sy(y);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<path d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f\" "
                  "stroke=\"%s\" stroke-width=\"1.5\"/>\n",
                  cx - r, cy - r, cx + r, cy + r, cx - r, cy + r, cx + r, cy - r,
                  color.c_str());
    body_ += buf;
  }

  void add_label(double x, double y, const std::string& text, const std::string& color) {
    body_ += "<text x=\"" + px(x) + "\" y=\"" + py(y) + "\" fill=\"" + color +
             "\" font-family=\"monospace\" font-size=\"12\">" + text + "</text>\n";
  }

  std::string render() const {
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" +
           num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
           "\" fill=\"white\"/>\n";
    // plot frame and axis labels
    out += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
           num(kW - 2 * kMargin) + "\" height=\"" + num(kH - 2 * kMargin) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  kW / 2.0, kH - 12.0, x_label_.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
                  "text-anchor=\"middle\" transform=\"rotate(-90 14 %.2f)\">%s</text>\n",
                  14.0, kH / 2.0, kH / 2.0, y_label_.c_str());
    out += buf;
    for (int k = 0; k <= 4; ++k) {
      const double fx = x_min_ + (x_max_ - x_min_) * k / 4.0;
      const double fy = y_min_ + (y_max_ - y_min_) * k / 4.0;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"10\" "
                    "text-anchor=\"middle\">%g</text>\n",
                    sx(fx), kH - kMargin + 16.0, fx);
      out += buf;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"10\" "
                    "text-anchor=\"end\">%g</text>\n",
                    kMargin - 6.0, sy(fy) + 3.0, fy);
      out += buf;
    }
    out += "<clipPath id=\"plot\"><rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) +
           "\" width=\"" + num(kW - 2 * kMargin) + "\" height=\"" + num(kH - 2 * kMargin) +
           "\"/></clipPath>\n";
    out += "<g clip-path=\"url(#plot)\">\n" + body_ + "</g>\n</svg>\n";
    return out;
  }

 private:
  static constexpr double kW = 720.0, kH = 600.0, kMargin = 50.0;

  double sx(double x) const {
    return kMargin + (x - x_min_) / (x_max_ - x_min_) * (kW - 2 * kMargin);
  }
  double sy(double y) const {
    return kH - kMargin - (y - y_min_) / (y_max_ - y_min_) * (kH - 2 * kMargin);
  }
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
  }
  std::string px(double x) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", sx(x));
    return buf;
  }
  std::string py(double y) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", sy(y));
    return buf;
  }

  double x_min_, x_max_, y_min_, y_max_;
  std::string x_label_, y_label_;
  std::string body_;
};

}  // namespace spreach
