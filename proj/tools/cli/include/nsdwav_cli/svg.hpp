#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nsdwav::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
  std::string color;
};

struct PlotPanel {
  std::string title;
  std::vector<PlotSeries> series;
};

// Stacked line panels sharing the x grid, followed by a bar panel
// (label, value). Static SVG with no scripts or external references.
std::string render_svg(const std::string& title, const std::vector<double>& x,
                       const std::vector<PlotPanel>& panels,
                       const std::vector<std::pair<std::string, double>>& bars);

}  // namespace nsdwav::cli
