#include "cftp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cftp::xprmt {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kPalette[] = {"#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

double parse(const std::string& cell) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(cell);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct Point {
  double x, y, lo, hi;
};

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double p0, double p1) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = ((log ? std::log10(v) : v) - a) / (b - a);
    return p0 + t * (p1 - p0);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
      }
    } else {
      for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
    }
    return out;
  }
};

Axis make_axis(double lo, double hi, bool log) {
  if (!(lo <= hi)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo) hi = lo * 10.0;
  } else if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, log};
}

}  // namespace

std::string line_chart(const Table& table, const ChartSpec& spec) {
  const std::size_t xi = table.column(spec.x_column);
  const std::size_t yi = table.column(spec.y_column);
  const bool has_err = !spec.err_column.empty();
  const bool has_series = !spec.series_column.empty();
  const std::size_t ei = has_err ? table.column(spec.err_column) : 0;
  const std::size_t si = has_series ? table.column(spec.series_column) : 0;

  std::vector<std::string> names;
  std::vector<std::vector<Point>> series;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& row : table.rows) {
    const std::string name = has_series ? row[si] : spec.y_column;
    const double x = parse(row[xi]);
    const double y = parse(row[yi]);
    const double e = has_err ? parse(row[ei]) : 0.0;
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      names.push_back(name);
      series.emplace_back();
      it = names.end() - 1;
    }
    double lo = y, hi = y;
    if (std::isfinite(e) && e > 0.0) {
      lo = y - e;
      hi = y + e;
      if (spec.log_y && lo <= 0.0) lo = y;
    }
    series[static_cast<std::size_t>(it - names.begin())].push_back({x, y, lo, hi});
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, lo);
    yhi = std::max(yhi, hi);
  }
  const Axis ax = make_axis(xlo, xhi, spec.log_x);
  const Axis ay = make_axis(ylo, yhi, spec.log_y);
  const double px0 = kLeft, px1 = kWidth - kRight, py0 = kHeight - kBottom, py1 = kTop;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(kWidth / 2 - kRight / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << fmt(px0) << "\" y=\"" << fmt(py1) << "\" width=\"" << fmt(px1 - px0) << "\" height=\""
     << fmt(py0 - py1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = ax.map(t, px0, px1);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(py0) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(py0 + 5)
       << "\" stroke=\"black\"/><text x=\"" << fmt(x) << "\" y=\"" << fmt(py0 + 18) << "\" text-anchor=\"middle\">"
       << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = ay.map(t, py0, py1);
    os << "<line x1=\"" << fmt(px0 - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(px0) << "\" y2=\"" << fmt(y)
       << "\" stroke=\"black\"/><text x=\"" << fmt(px0 - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
       << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << fmt((px0 + px1) / 2) << "\" y=\"" << fmt(kHeight - 12) << "\" text-anchor=\"middle\">"
     << escape(spec.x_label.empty() ? spec.x_column : spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << fmt((py0 + py1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(spec.y_label.empty() ? spec.y_column : spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    auto& pts = series[k];
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      os << (i ? " " : "") << fmt(ax.map(pts[i].x, px0, px1)) << ',' << fmt(ay.map(pts[i].y, py0, py1));
    }
    os << "\"/>\n";
    for (const auto& p : pts) {
      if (p.hi > p.lo) {
        const double x = ax.map(p.x, px0, px1);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(ay.map(p.lo, py0, py1)) << "\" x2=\"" << fmt(x)
           << "\" y2=\"" << fmt(ay.map(p.hi, py0, py1)) << "\" stroke=\"" << colour << "\"/>\n";
      }
    }
    const double ly = py1 + 14.0 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << fmt(px1 + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(px1 + 30) << "\" y2=\""
       << fmt(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/><text x=\"" << fmt(px1 + 35) << "\" y=\""
       << fmt(ly + 4) << "\">" << escape(names[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cftp::xprmt
