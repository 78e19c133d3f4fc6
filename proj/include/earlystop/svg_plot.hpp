#pragma once

#include <string>
#include <vector>

namespace earlystop {

// Deterministic standalone SVG line plots: same input, same bytes.
struct SvgCurve {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::string label;
};

struct SvgMarker {
  double x = 0.0;
  std::string color = "#2ca02c";
  std::string label;
};

struct SvgPanel {
  std::string title;
  std::string x_label = "k";
  std::string y_label = "risk";
  bool log_x = true;  // plotted as log10(1 + x)
  std::vector<SvgCurve> curves;
  std::vector<SvgMarker> markers;
};

void write_svg_panels(const std::string& path, const std::vector<SvgPanel>& panels,
                      int per_row = 4);

}  // namespace earlystop
