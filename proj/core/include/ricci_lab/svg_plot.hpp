#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rlab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
  /// Free-text lines drawn under the title (e.g. fitted slopes).
  std::vector<std::string> annotations;
};

/// Deterministic SVG line plot; only the supplied samples are drawn.
std::string render_svg(const PlotSpec& spec);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace rlab
