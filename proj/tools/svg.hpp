#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lvhba::cli {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // (iteration, value)
};

/// Static log-y line chart of convergence curves. Nonpositive values are
/// floored at 1e-16 so they stay plottable.
std::string convergence_svg(const std::string& title,
                            const std::vector<SvgSeries>& series);

}  // namespace lvhba::cli
