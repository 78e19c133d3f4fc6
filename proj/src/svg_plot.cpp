#include "earlystop/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "earlystop/errors.hpp"

namespace earlystop {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double map_x(double x, bool log_x) { return log_x ? std::log10(1.0 + x) : x; }

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool ok() const { return std::isfinite(lo) && std::isfinite(hi); }
  void pad() {
    if (!ok()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double p = 0.05 * (hi - lo);
      lo -= p;
      hi += p;
    }
  }
};

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

}  // namespace

void write_svg_panels(const std::string& path, const std::vector<SvgPanel>& panels,
                      int per_row) {
  if (panels.empty()) throw validation_error("write_svg_panels: no panels");
  if (per_row < 1) throw validation_error("write_svg_panels: per_row must be >= 1");

  const int panel_w = 320, panel_h = 240;
  const int margin_l = 46, margin_r = 10, margin_t = 26, margin_b = 34;
  const int cols = std::min<int>(per_row, static_cast<int>(panels.size()));
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const int total_w = cols * panel_w, total_h = rows * panel_h;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("write_svg_panels: cannot open " + path);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w
      << "\" height=\"" << total_h << "\" viewBox=\"0 0 " << total_w << " " << total_h
      << "\">\n";
  out << "<rect width=\"" << total_w << "\" height=\"" << total_h
      << "\" fill=\"#ffffff\"/>\n";

  for (size_t idx = 0; idx < panels.size(); ++idx) {
    const SvgPanel& panel = panels[idx];
    const int px = static_cast<int>(idx % cols) * panel_w;
    const int py = static_cast<int>(idx / cols) * panel_h;
    const double x0 = px + margin_l, y0 = py + margin_t;
    const double plot_w = panel_w - margin_l - margin_r;
    const double plot_h = panel_h - margin_t - margin_b;

    Range rx, ry;
    for (const SvgCurve& c : panel.curves) {
      for (double v : c.x) rx.add(map_x(v, panel.log_x));
      for (double v : c.y) ry.add(v);
    }
    for (const SvgMarker& m : panel.markers) rx.add(map_x(m.x, panel.log_x));
    rx.pad();
    ry.pad();

    auto sx = [&](double v) { return x0 + (map_x(v, panel.log_x) - rx.lo) / (rx.hi - rx.lo) * plot_w; };
    auto sy = [&](double v) { return y0 + plot_h - (v - ry.lo) / (ry.hi - ry.lo) * plot_h; };

    out << "<g>\n";
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px + panel_w / 2.0) << "\" y=\"" << fmt(py + 16.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << escape_xml(panel.title) << "</text>\n";
    out << "<text x=\"" << fmt(x0 + plot_w / 2.0) << "\" y=\"" << fmt(py + panel_h - 8.0)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << escape_xml(panel.x_label + (panel.log_x ? " (log scale)" : "")) << "</text>\n";
    out << "<text x=\"" << fmt(px + 12.0) << "\" y=\"" << fmt(y0 + plot_h / 2.0)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 " << fmt(px + 12.0) << " " << fmt(y0 + plot_h / 2.0)
        << ")\">" << escape_xml(panel.y_label) << "</text>\n";

    for (const SvgMarker& m : panel.markers) {
      const double mx = sx(m.x);
      out << "<line x1=\"" << fmt(mx) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(mx)
          << "\" y2=\"" << fmt(y0 + plot_h) << "\" stroke=\"" << m.color
          << "\" stroke-width=\"1\" stroke-dasharray=\"3,2\"/>\n";
    }

    for (const SvgCurve& c : panel.curves) {
      if (c.x.size() != c.y.size())
        throw validation_error("write_svg_panels: curve x/y length mismatch");
      std::string d;
      bool pen_down = false;
      for (size_t i = 0; i < c.x.size(); ++i) {
        if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) {
          pen_down = false;
          continue;
        }
        d += pen_down ? " L" : (d.empty() ? "M" : " M");
        d += fmt(sx(c.x[i])) + " " + fmt(sy(c.y[i]));
        pen_down = true;
      }
      if (d.empty()) continue;
      out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << c.color
          << "\" stroke-width=\"1.2\"";
      if (c.dashed) out << " stroke-dasharray=\"4,3\"";
      out << "/>\n";
    }

    // Legend: curve labels then marker labels, stacked in the top-right corner.
    double ly = y0 + 12.0;
    auto legend_line = [&](const std::string& color, const std::string& label, bool dash) {
      if (label.empty()) return;
      out << "<line x1=\"" << fmt(x0 + plot_w - 74.0) << "\" y1=\"" << fmt(ly - 3.0)
          << "\" x2=\"" << fmt(x0 + plot_w - 58.0) << "\" y2=\"" << fmt(ly - 3.0)
          << "\" stroke=\"" << color << "\" stroke-width=\"1.2\""
          << (dash ? " stroke-dasharray=\"3,2\"" : "") << "/>\n";
      out << "<text x=\"" << fmt(x0 + plot_w - 54.0) << "\" y=\"" << fmt(ly)
          << "\" font-family=\"sans-serif\" font-size=\"9\">" << escape_xml(label)
          << "</text>\n";
      ly += 11.0;
    };
    for (const SvgCurve& c : panel.curves) legend_line(c.color, c.label, c.dashed);
    for (const SvgMarker& m : panel.markers) legend_line(m.color, m.label, true);

    out << "</g>\n";
  }
  out << "</svg>\n";
  if (!out) throw validation_error("write_svg_panels: write failed for " + path);
}

}  // namespace earlystop
