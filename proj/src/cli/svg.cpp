#include "ipp/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ipp::cli {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 200, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
    for (double v : s.lo) yr.add(v);
    for (double v : s.hi) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(yv) + 4)
      << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.lo.size() == n && s.hi.size() == n && n > 0) {
      o << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < n; ++i) o << num(sx(s.x[i])) << ',' << num(sy(s.hi[i])) << ' ';
      for (std::size_t i = n; i-- > 0;) o << num(sx(s.x[i])) << ',' << num(sy(s.lo[i])) << ' ';
      o << "\"/>\n";
    }
    o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (s.dashed) o << " stroke-dasharray=\"6,4\"";
    o << " points=\"";
    for (std::size_t i = 0; i < n; ++i) o << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
    o << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
      << kWidth - kRight + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
      << "/>\n";
    o << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << ly << "\">" << escape(s.name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string path_overlay(const std::string& title, const SpatialGraph& g,
                         std::span<const double> vertex_values, std::span<const VertexId> path) {
  Range xr, yr, vr;
  for (const auto& p : g.positions()) {
    xr.add(p.x);
    yr.add(p.y);
  }
  for (double v : vertex_values) vr.add(v);
  xr.settle();
  yr.settle();
  vr.settle();
  const double margin = 40, size = 520;
  const double span = std::max(xr.hi - xr.lo, yr.hi - yr.lo);
  auto sx = [&](double x) { return margin + (x - xr.lo) / span * size; };
  auto sy = [&](double y) { return margin + size - (y - yr.lo) / span * size; };
  const double w = 2 * margin + (xr.hi - xr.lo) / span * size;
  const double h = 2 * margin + size;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  for (const auto& e : g.edges()) {
    const auto a = g.position(e.u), b = g.position(e.v);
    o << "<line class=\"edge\" x1=\"" << num(sx(a.x)) << "\" y1=\"" << num(sy(a.y)) << "\" x2=\""
      << num(sx(b.x)) << "\" y2=\"" << num(sy(b.y)) << "\" stroke=\"#cccccc\"/>\n";
  }
  for (VertexId v = 0; v < static_cast<VertexId>(g.size()); ++v) {
    const double t = static_cast<std::size_t>(v) < vertex_values.size()
                         ? (vertex_values[static_cast<std::size_t>(v)] - vr.lo) / (vr.hi - vr.lo)
                         : 0.0;
    const int shade = static_cast<int>(std::lround(235 - 175 * std::clamp(t, 0.0, 1.0)));
    const auto p = g.position(v);
    o << "<circle class=\"vertex\" data-id=\"" << v << "\" cx=\"" << num(sx(p.x)) << "\" cy=\""
      << num(sy(p.y)) << "\" r=\"6\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#888888\"/>\n";
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto a = g.position(path[i - 1]), b = g.position(path[i]);
    o << "<line class=\"path\" data-from=\"" << path[i - 1] << "\" data-to=\"" << path[i]
      << "\" x1=\"" << num(sx(a.x)) << "\" y1=\"" << num(sy(a.y)) << "\" x2=\"" << num(sx(b.x))
      << "\" y2=\"" << num(sy(b.y)) << "\" stroke=\"#d62728\" stroke-width=\"3\"/>\n";
  }
  if (!path.empty()) {
    const auto s = g.position(path.front());
    o << "<circle class=\"start\" cx=\"" << num(sx(s.x)) << "\" cy=\"" << num(sy(s.y))
      << "\" r=\"9\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ipp::cli
