#include "hgauge/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hgauge/dyadic.hpp"
#include "hgauge/error.hpp"

namespace hgauge {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 55;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    std::string cell(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(std::move(cell));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Pad degenerate ranges so the mapping stays finite.
  void settle() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidArgument("CSV has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    if (table.header.empty()) {
      table.header = split_row(line);
    } else {
      auto row = split_row(line);
      if (row.size() != table.header.size()) throw InvalidArgument("CSV row width differs from the header");
      table.rows.push_back(std::move(row));
    }
  }
  if (table.header.empty()) throw InvalidArgument("CSV is empty");
  return table;
}

double cell_value(const std::string& cell) {
  if (cell.find("/2^") != std::string::npos) return Dyadic::parse(cell).to_double();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) throw InvalidArgument("non-numeric CSV cell '" + cell + "'");
  return v;
}

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec, const std::string& metadata) {
  auto y_of = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  Range xr, yr;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (spec.log_y && !(y > 0)) continue;
      xr.add(x);
      yr.add(y_of(y));
    }
  }
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<metadata><![CDATA[" << metadata << "]]></metadata>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(spec.title) << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    double xv = xr.lo + (xr.hi - xr.lo) * i / 4;
    double yv = yr.lo + (yr.hi - yr.lo) * i / 4;
    svg << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(px(xv)) << "\" y2=\""
        << fmt(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(py(yv)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
        << (spec.log_y ? "1e" + tick_label(yv) : tick_label(yv)) << "</text>\n";
  }
  if (!spec.x_label.empty()) {
    svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 12) << "\" text-anchor=\"middle\">"
        << escape(spec.x_label) << "</text>\n";
  }
  if (!spec.y_label.empty()) {
    svg << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    std::string points;
    std::string markers;
    for (const auto& [x, y] : series[i].points) {
      if (spec.log_y && !(y > 0)) continue;
      std::string cx = fmt(px(x)), cy = fmt(py(y_of(y)));
      points += (points.empty() ? "" : " ") + cx + "," + cy;
      markers += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    svg << "<g class=\"series\">\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n"
        << markers << "</g>\n";
  }

  // Legend, top right inside the frame.
  const double lx = kLeft + pw - 150;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    double ly = kTop + 14 + 16 * static_cast<double>(i);
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text class=\"legend\" x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\">"
        << escape(series[i].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace hgauge
