#ifndef HGAUGE_PLOT_HPP
#define HGAUGE_PLOT_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hgauge {

// A CSV file with a header row. Lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws InvalidArgument when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

// Numeric cell value; accepts plain numbers and "p/2^q" dyadics.
double cell_value(const std::string& cell);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // points with y <= 0 are dropped
};

// Standalone SVG 1.1 line plot with markers and a legend. `metadata` is
// embedded verbatim (as CDATA) in the <metadata> element. Byte-identical for
// identical input.
std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec, const std::string& metadata);

}  // namespace hgauge

#endif  // HGAUGE_PLOT_HPP
