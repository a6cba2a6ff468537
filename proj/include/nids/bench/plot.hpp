#pragma once

#include <string>
#include <vector>

namespace nids::bench {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

enum class PlotKind { accuracy_vs_size, time_vs_size, mse_vs_epoch };

/// Standalone SVG line chart, one polyline per series with one vertex per
/// point. time_vs_size uses a log10 y axis labelled at whole decades.
/// Throws std::invalid_argument on an empty series list or an empty or
/// ragged series; non-positive times cannot go on the log axis and throw too.
std::string plot_curves(const std::vector<Series>& series, PlotKind kind);

struct BarGroup {
  std::string name;
  std::vector<double> values;  // one bar per legend entry, in [0, 1]
};

/// Grouped bar chart on a [0, 1] axis, one <g class="bar-group"> per group.
std::string plot_bars(const std::vector<BarGroup>& groups, const std::vector<std::string>& legend,
                      const std::string& title);

}  // namespace nids::bench
