#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "thrustwalk/sim_log.hpp"

namespace thrustwalk {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
  std::string color;
  bool dashed = false;
};

struct PlotPanel {
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Stacked line-plot panels sharing one time axis.
struct Figure {
  std::string title;
  std::vector<double> t;
  std::vector<PlotPanel> panels;
};

std::string render_svg(const Figure& fig);
void write_svg(const Figure& fig, const std::filesystem::path& path);

/// position.svg, attitude_thrust.svg, friction.svg under dir.
void write_standard_plots(const LogTable& table, double mu, const std::filesystem::path& dir);

}  // namespace thrustwalk
