#include "nids/bench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nids::bench {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#843c39"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
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

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  std::vector<double> ticks;  // in data units (exponents on a log axis)

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return (t - lo) / (hi - lo);
  }
};

Axis linear_axis(double lo, double hi) {
  if (hi - lo <= 0) {
    const double pad = lo == 0 ? 0.5 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const double rough = (hi - lo) / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(rough)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= rough) break;
  }
  Axis a;
  a.lo = std::floor(lo / step) * step;
  a.hi = std::ceil(hi / step) * step;
  for (double t = a.lo; t <= a.hi + step * 1e-9; t += step) a.ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return a;
}

Axis log_axis(double lo, double hi) {
  Axis a;
  a.log = true;
  a.lo = std::floor(std::log10(lo));
  a.hi = std::ceil(std::log10(hi));
  if (a.hi <= a.lo) a.hi = a.lo + 1;
  for (double k = a.lo; k <= a.hi; k += 1) a.ticks.push_back(k);
  return a;
}

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" + num(kLeft + kPlotW / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n" + "<rect x=\"" +
         num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) + "\" height=\"" + num(kPlotH) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
}

std::string legend_entry(std::size_t i, const std::string& name) {
  const double y = kTop + 10 + 18 * static_cast<double>(i);
  const double x = kLeft + kPlotW + 15;
  return "<rect x=\"" + num(x) + "\" y=\"" + num(y - 8) + "\" width=\"12\" height=\"10\" fill=\"" + colour(i) +
         "\"/><text x=\"" + num(x + 18) + "\" y=\"" + num(y) + "\">" + escape(name) + "</text>\n";
}

std::string y_ticks(const Axis& a) {
  std::string out;
  for (double t : a.ticks) {
    const double y = kTop + kPlotH * (1 - (t - a.lo) / (a.hi - a.lo));
    out += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + kPlotW) + "\" y2=\"" +
           num(y) + "\" stroke=\"#ddd\"/>";
    if (a.log) {
      const auto k = static_cast<long>(t);
      out += "<text class=\"tick decade\" data-exponent=\"" + std::to_string(k) + "\" x=\"" + num(kLeft - 8) +
             "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">10<tspan dy=\"-5\" font-size=\"8\">" +
             std::to_string(k) + "</tspan></text>\n";
    } else {
      out += "<text class=\"tick\" x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
             label(t) + "</text>\n";
    }
  }
  return out;
}

std::string x_ticks(const Axis& a) {
  std::string out;
  for (double t : a.ticks) {
    const double x = kLeft + kPlotW * (t - a.lo) / (a.hi - a.lo);
    out += "<text class=\"tick\" x=\"" + num(x) + "\" y=\"" + num(kTop + kPlotH + 16) +
           "\" text-anchor=\"middle\">" + label(t) + "</text>\n";
  }
  return out;
}

std::string axis_titles(const std::string& x, const std::string& y) {
  return "<text x=\"" + num(kLeft + kPlotW / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
         escape(x) + "</text>\n<text transform=\"translate(16," + num(kTop + kPlotH / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(y) + "</text>\n";
}

}  // namespace

std::string plot_curves(const std::vector<Series>& series, PlotKind kind) {
  if (series.empty()) throw std::invalid_argument("plot: no series");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) throw std::invalid_argument("plot: empty or ragged series '" + s.name + "'");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (kind == PlotKind::time_vs_size && !(s.y[i] > 0)) {
        throw std::invalid_argument("plot: non-positive time on a log axis");
      }
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }

  const Axis xa = linear_axis(kind == PlotKind::mse_vs_epoch ? std::min(xlo, 0.0) : 0.0, xhi);
  Axis ya;
  std::string title, xt, yt;
  switch (kind) {
    case PlotKind::accuracy_vs_size:
      ya = linear_axis(std::min(ylo, 0.5), 1.0);
      title = "Average accuracy vs dataset size";
      xt = "instances";
      yt = "average accuracy";
      break;
    case PlotKind::time_vs_size:
      ya = log_axis(ylo, yhi);
      title = "Classification time vs dataset size";
      xt = "instances";
      yt = "seconds (train + classify)";
      break;
    case PlotKind::mse_vs_epoch:
      ya = linear_axis(0.0, yhi);
      title = "Training MSE per epoch";
      xt = "epoch";
      yt = "MSE";
      break;
  }

  std::string svg = header(title) + y_ticks(ya) + x_ticks(xa) + axis_titles(xt, yt);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    svg += "<polyline class=\"series\" data-name=\"" + escape(s.name) + "\" fill=\"none\" stroke=\"" + colour(i) +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      if (p > 0) svg += ' ';
      svg += num(kLeft + kPlotW * xa.map(s.x[p])) + "," + num(kTop + kPlotH * (1 - ya.map(s.y[p])));
    }
    svg += "\"/>\n" + legend_entry(i, s.name);
  }
  return svg + "</svg>\n";
}

std::string plot_bars(const std::vector<BarGroup>& groups, const std::vector<std::string>& legend,
                      const std::string& title) {
  if (groups.empty() || legend.empty()) throw std::invalid_argument("plot: no bars");
  const Axis ya = linear_axis(0.0, 1.0);
  std::string svg = header(title) + y_ticks(ya);
  const double slot = kPlotW / static_cast<double>(groups.size());
  const double bar = slot * 0.8 / static_cast<double>(legend.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].values.size() != legend.size()) throw std::invalid_argument("plot: bar count differs from legend");
    const double x0 = kLeft + slot * static_cast<double>(g) + slot * 0.1;
    svg += "<g class=\"bar-group\" data-name=\"" + escape(groups[g].name) + "\">";
    for (std::size_t b = 0; b < legend.size(); ++b) {
      const double v = std::clamp(groups[g].values[b], 0.0, 1.0);
      svg += "<rect x=\"" + num(x0 + bar * static_cast<double>(b)) + "\" y=\"" + num(kTop + kPlotH * (1 - v)) +
             "\" width=\"" + num(bar) + "\" height=\"" + num(kPlotH * v) + "\" fill=\"" + colour(b) + "\"/>";
    }
    svg += "<text x=\"" + num(x0 + slot * 0.4) + "\" y=\"" + num(kTop + kPlotH + 16) +
           "\" text-anchor=\"middle\">" + escape(groups[g].name) + "</text></g>\n";
  }
  for (std::size_t b = 0; b < legend.size(); ++b) svg += legend_entry(b, legend[b]);
  return svg + "</svg>\n";
}

}  // namespace nids::bench
