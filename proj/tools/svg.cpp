#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lvhba::cli {

namespace {

constexpr double kW = 760, kH = 420;
constexpr double kL = 70, kR = 20, kT = 40, kB = 50;

double nice_floor(double v) { return std::floor(v); }

}  // namespace

std::string convergence_svg(const std::string& title,
                            const std::vector<SvgSeries>& series) {
  double xmin = 0, xmax = 1, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [k, v] : s.points) {
      const double lv = std::log10(std::max(v, 1e-16));
      xmax = std::max(xmax, k);
      ymin = std::min(ymin, lv);
      ymax = std::max(ymax, lv);
    }
  if (ymin > ymax) {
    ymin = -1;
    ymax = 1;
  }
  ymin = nice_floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax - ymin < 1) ymax = ymin + 1;

  const double plot_w = kW - kL - kR, plot_h = kH - kT - kB;
  auto X = [&](double k) { return kL + plot_w * (k - xmin) / (xmax - xmin); };
  auto Y = [&](double lv) {
    return kT + plot_h * (1.0 - (lv - ymin) / (ymax - ymin));
  };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
     << "' height='" << kH << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << kW / 2 << "' y='24' text-anchor='middle' "
     << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";

  // Gridlines at integer log levels.
  for (double lv = ymin; lv <= ymax + 1e-9; lv += 1.0) {
    os << "<line x1='" << kL << "' y1='" << Y(lv) << "' x2='" << kW - kR
       << "' y2='" << Y(lv) << "' stroke='#ddd'/>\n";
    os << "<text x='" << kL - 8 << "' y='" << Y(lv) + 4
       << "' text-anchor='end' font-family='sans-serif' font-size='11'>1e"
       << static_cast<long>(lv) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double k = xmin + (xmax - xmin) * i / 4.0;
    os << "<text x='" << X(k) << "' y='" << kH - kB + 18
       << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
       << static_cast<long>(k) << "</text>\n";
  }
  os << "<line x1='" << kL << "' y1='" << kT << "' x2='" << kL << "' y2='"
     << kH - kB << "' stroke='black'/>\n";
  os << "<line x1='" << kL << "' y1='" << kH - kB << "' x2='" << kW - kR
     << "' y2='" << kH - kB << "' stroke='black'/>\n";
  os << "<text x='" << kW / 2 << "' y='" << kH - 12
     << "' text-anchor='middle' font-family='sans-serif' "
        "font-size='12'>iteration</text>\n";

  double ly = kT + 12;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    os << "<polyline fill='none' stroke='" << s.color
       << "' stroke-width='1.5' points='";
    for (const auto& [k, v] : s.points)
      os << X(k) << "," << Y(std::log10(std::max(v, 1e-16))) << " ";
    os << "'/>\n";
    os << "<text x='" << kW - kR - 6 << "' y='" << ly
       << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='"
       << s.color << "'>" << s.label << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lvhba::cli
