#include "nsdwav_cli/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace nsdwav::cli {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 220.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return ec == std::errc{} ? std::string(buf.data(), ptr) : "0";
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

std::string render_svg(const std::string& title, const std::vector<double>& x,
                       const std::vector<PlotPanel>& panels,
                       const std::vector<std::pair<std::string, double>>& bars) {
  const std::size_t rows = panels.size() + (bars.empty() ? 0 : 1);
  const double height = kMargin + static_cast<double>(rows) * (kPanelHeight + kMargin);
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                    "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(title) + "</text>\n";

  const double x_min = x.empty() ? 0.0 : x.front();
  const double x_max = x.empty() ? 1.0 : x.back();
  const double plot_w = kWidth - 2 * kMargin;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double top = kMargin + static_cast<double>(p) * (kPanelHeight + kMargin);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : panels[p].series) {
      for (double v : s.y) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!(hi > lo)) { lo -= 1.0; hi += 1.0; }
    svg += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
           "\" height=\"" + num(kPanelHeight) + "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg += "<text x=\"" + num(kMargin) + "\" y=\"" + num(top - 6) + "\">" +
           escape(panels[p].title) + "</text>\n";
    double legend_x = kMargin + plot_w;
    for (auto it = panels[p].series.rbegin(); it != panels[p].series.rend(); ++it) {
      svg += "<text x=\"" + num(legend_x) + "\" y=\"" + num(top - 6) +
             "\" text-anchor=\"end\" fill=\"" + it->color + "\">" + escape(it->label) + "</text>\n";
      legend_x -= 8.0 * static_cast<double>(it->label.size()) + 16.0;
    }
    for (const auto& s : panels[p].series) {
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1\" points=\"";
      for (std::size_t m = 0; m < s.y.size() && m < x.size(); ++m) {
        const double px = kMargin + (x[m] - x_min) / (x_max - x_min) * plot_w;
        const double py = top + kPanelHeight - (s.y[m] - lo) / (hi - lo) * kPanelHeight;
        svg += num(px) + "," + num(py) + " ";
      }
      svg += "\"/>\n";
    }
  }

  if (!bars.empty()) {
    const double top = kMargin + static_cast<double>(panels.size()) * (kPanelHeight + kMargin);
    double peak = 0.0;
    for (const auto& b : bars) peak = std::max(peak, b.second);
    if (!(peak > 0.0)) peak = 1.0;
    svg += "<text x=\"" + num(kMargin) + "\" y=\"" + num(top - 6) + "\">mean MSE</text>\n";
    const double slot = plot_w / static_cast<double>(bars.size());
    for (std::size_t b = 0; b < bars.size(); ++b) {
      const double h = bars[b].second / peak * (kPanelHeight - 20.0);
      const double bx = kMargin + slot * static_cast<double>(b) + slot * 0.25;
      svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(top + kPanelHeight - h) + "\" width=\"" +
             num(slot * 0.5) + "\" height=\"" + num(h) + "\" fill=\"#4a7ab5\"/>\n";
      svg += "<text x=\"" + num(bx + slot * 0.25) + "\" y=\"" + num(top + kPanelHeight + 14) +
             "\" text-anchor=\"middle\">" + escape(bars[b].first) + " " + num(bars[b].second) +
             "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace nsdwav::cli
