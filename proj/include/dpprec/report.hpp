#ifndef DPPREC_REPORT_HPP_
#define DPPREC_REPORT_HPP_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpprec/errors.hpp"
#include "dpprec/evaluation.hpp"

namespace dpprec {

using json = nlohmann::ordered_json;

#ifndef DPPREC_VERSION
#define DPPREC_VERSION "0.0.0"
#endif

inline const char* library_version() { return DPPREC_VERSION; }

inline json to_json(const Aggregate& a) {
  json j;
  j["mean"] = a.mean;
  if (a.std_error) {
    j["std_error"] = *a.std_error;
  } else {
    j["std_error"] = nullptr;
  }
  return j;
}

inline json to_json(const RocCurve& curve) {
  json pts = json::array();
  for (const RocPoint& p : curve.points) {
    pts.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"lambda", p.lambda}});
  }
  return json{{"points", pts}, {"auc", curve.auc},
              {"warning_count", curve.warning_count}};
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot open " + path + " for writing");
  }
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Minimal static SVG line plots.

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series) {
  const int width = 640, height = 480, margin = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (!(xmax > xmin)) { xmax = xmin + 1.0; }
  if (!(ymax > ymin)) { ymax = ymin + 1.0; }
  auto px = [&](double v) {
    return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double v) {
    return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin);
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf"};

  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot open " + path + " for writing");
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"16\">" << title << "</text>\n"
      << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n"
      << "<text x=\"16\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << height / 2 << ")\">" << ylabel << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 4;
    const double yv = ymin + t * (ymax - ymin) / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << height - margin + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << xv << "</text>\n"
        << "<text x=\"" << margin - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << yv << "</text>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = kColors[si % 7];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 4 << "\" y=\""
        << margin + 16 * (si + 1) << "\" text-anchor=\"end\" font-size=\"12\" "
        << "fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace dpprec

#endif  // DPPREC_REPORT_HPP_
