#include "thrustwalk/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 220.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kGap = 30.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string render_svg(const Figure& fig) {
  const double plot_w = kWidth - kLeft - kRight;
  const double height = kTop + fig.panels.size() * (kPanelHeight + kGap) + 20.0;
  const double t0 = fig.t.empty() ? 0.0 : fig.t.front();
  const double t1 = fig.t.empty() ? 1.0 : std::max(fig.t.back(), t0 + 1e-9);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(fig.title) << "</text>\n";

  for (std::size_t pi = 0; pi < fig.panels.size(); ++pi) {
    const PlotPanel& panel = fig.panels[pi];
    const double top = kTop + pi * (kPanelHeight + kGap);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : panel.series)
      for (double v : s.y) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto sx = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * plot_w; };
    auto sy = [&](double v) { return top + (hi - v) / (hi - lo) * kPanelHeight; };

    svg << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << kPanelHeight << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << fmt(hi)
        << "</text>\n<text x=\"" << kLeft - 8 << "\" y=\"" << top + kPanelHeight
        << "\" text-anchor=\"end\">" << fmt(lo) << "</text>\n";
    svg << "<text x=\"14\" y=\"" << top + kPanelHeight / 2 << "\" transform=\"rotate(-90 14 "
        << top + kPanelHeight / 2 << ")\" text-anchor=\"middle\">" << escape(panel.y_label)
        << "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const PlotSeries& s = panel.series[si];
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      const std::size_t n = std::min(s.y.size(), fig.t.size());
      // Thin to roughly one point per pixel column.
      const std::size_t stride = std::max<std::size_t>(1, n / 1200);
      for (std::size_t i = 0; i < n; i += stride) svg << fmt(sx(fig.t[i])) << "," << fmt(sy(s.y[i])) << " ";
      if (n > 0) svg << fmt(sx(fig.t[n - 1])) << "," << fmt(sy(s.y[n - 1]));
      svg << "\"/>\n";
      const double ly = top + 14 + 16 * si;
      svg << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
          << kWidth - kRight + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
          << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly << "\">" << escape(s.label)
          << "</text>\n";
    }
  }
  const double bottom = kTop + fig.panels.size() * (kPanelHeight + kGap) - kGap;
  svg << "<text x=\"" << kLeft << "\" y=\"" << bottom + 16 << "\">" << fmt(t0) << "</text>\n"
      << "<text x=\"" << kLeft + plot_w << "\" y=\"" << bottom + 16 << "\" text-anchor=\"end\">"
      << fmt(t1) << " s</text>\n</svg>\n";
  return svg.str();
}

void write_svg(const Figure& fig, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_svg(fig);
}

void write_standard_plots(const LogTable& table, double mu, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto col = [&](const std::string& name) {
    const int c = table.column(name);
    std::vector<double> v;
    v.reserve(table.rows.size());
    for (const auto& r : table.rows) v.push_back(r[c]);
    return v;
  };
  const std::vector<double> t = col("t");
  const char* leg_colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};
  const char* leg_names[] = {"FL", "FR", "RL", "RR"};

  Figure pos{"COM position", t, {}};
  pos.panels.push_back({"x [m]", {{"x", col("x"), "#1f77b4"}}});
  pos.panels.push_back({"y [m]", {{"y", col("y"), "#d62728"}}});
  pos.panels.push_back({"z [m]", {{"z", col("z"), "#2ca02c"}}});
  write_svg(pos, dir / "position.svg");

  Figure att{"Attitude and thrust", t, {}};
  att.panels.push_back({"angle [rad]",
                        {{"roll", col("roll"), "#1f77b4"},
                         {"pitch", col("pitch"), "#d62728"},
                         {"yaw", col("yaw"), "#2ca02c"}}});
  PlotPanel thrust{"thrust [N]", {}};
  for (int leg = 0; leg < kNumLegs; ++leg)
    thrust.series.push_back({leg_names[leg], col("thrust" + std::to_string(leg)), leg_colors[leg]});
  att.panels.push_back(thrust);
  write_svg(att, dir / "attitude_thrust.svg");

  Figure fr{"Friction ratio |f_xy| / f_z", t, {}};
  for (int leg = 0; leg < kNumLegs; ++leg) {
    PlotPanel p{leg_names[leg], {}};
    p.series.push_back({"ratio", col("friction_ratio" + std::to_string(leg)), leg_colors[leg]});
    p.series.push_back({"+mu", std::vector<double>(t.size(), mu), "#555", true});
    p.series.push_back({"-mu", std::vector<double>(t.size(), -mu), "#555", true});
    fr.panels.push_back(p);
  }
  write_svg(fr, dir / "friction.svg");
}

}  // namespace thrustwalk
