#include "ricci_lab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ricci_lab/errors.hpp"
#include "ricci_lab/svg_plot.hpp"

namespace rlab {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

InequalityReport make_report(std::string check_id, double lhs, double rhs, std::string witness,
                             bool hard, Tolerance tol) {
  InequalityReport report;
  report.check_id = std::move(check_id);
  report.lhs = lhs;
  report.rhs = rhs;
  report.margin = rhs - lhs;
  report.witness = std::move(witness);
  report.hard = hard;
  report.pass = std::isfinite(report.margin) &&
                report.margin >= -tol.abs - tol.rel * std::abs(rhs);
  return report;
}

void keep_worst(InequalityReport& worst, const InequalityReport& candidate) {
  if (worst.check_id.empty() || (worst.pass && !candidate.pass) ||
      (worst.pass == candidate.pass && candidate.margin < worst.margin))
    worst = candidate;
}

void write_report_csv(std::ostream& out, const std::vector<InequalityReport>& reports) {
  out << "check_id,t,q,p,mu,sigma,lhs,rhs,margin,witness,pass\n";
  for (const InequalityReport& r : reports) {
    // Witness labels are free text; commas would shift every later column.
    std::string witness = r.witness;
    std::replace(witness.begin(), witness.end(), ',', ';');
    out << r.check_id << ',' << format_double(r.t) << ',' << format_double(r.q) << ','
        << format_double(r.p) << ',' << format_double(r.mu) << ',' << format_double(r.sigma) << ','
        << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << format_double(r.margin)
        << ',' << witness << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

// --- CSV input -------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("CSV column '" + name + "' not found");
  return static_cast<int>(it - header.begin());
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const int c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (c >= static_cast<int>(row.size()) || row[c].empty()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    out.push_back(std::strtod(row[c].c_str(), nullptr));
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + " is empty");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_csv_line(line));
  }
  return table;
}

// --- SVG output ------------------------------------------------------------

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 60.0;
constexpr double kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string short_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const PlotSeries& s : spec.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x_lo = std::min(x_lo, tx(s.x[i]));
      x_hi = std::max(x_hi, tx(s.x[i]));
      y_lo = std::min(y_lo, ty(s.y[i]));
      y_hi = std::max(y_hi, ty(s.y[i]));
    }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi - x_lo < 1e-300) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi - y_lo < 1e-12 * (1.0 + std::abs(y_hi))) {
    const double pad = 0.05 * (1.0 + std::abs(y_hi));
    y_lo -= pad;
    y_hi += pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double v) { return kTop + plot_h - (ty(v) - y_lo) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
  for (std::size_t a = 0; a < spec.annotations.size(); ++a)
    svg << "<text x=\"" << kLeft << "\" y=\"" << fixed(36 + 14 * a)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(spec.annotations[a])
        << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = x_lo + (x_hi - x_lo) * tick / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * tick / 4.0;
    const double vx = spec.log_x ? std::pow(10.0, fx) : fx;
    const double vy = spec.log_y ? std::pow(10.0, fy) : fy;
    const double sx = kLeft + plot_w * tick / 4.0;
    const double sy = kTop + plot_h - plot_h * tick / 4.0;
    svg << "<text x=\"" << fixed(sx) << "\" y=\"" << fixed(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << short_number(vx) << "</text>\n";
    svg << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(sy + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << short_number(vy)
        << "</text>\n";
  }
  svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << fixed(kTop + plot_h / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const PlotSeries& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      svg << (first ? "" : " ") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
      first = false;
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << fixed(kLeft + plot_w - 4) << "\" y=\"" << fixed(kTop + 14 + 14 * k)
        << "\" text-anchor=\"end\" fill=\"" << color
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rlab
