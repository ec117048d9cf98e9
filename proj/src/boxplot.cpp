#include "gaitkit/boxplot.hpp"

#include <algorithm>
#include <cmath>

#include "format.hpp"
#include "gaitkit/error.hpp"

namespace gaitkit {

double quantile_type7(std::span<const double> sorted_values, double p) {
  const std::size_t n = sorted_values.size();
  if (n == 0) raise(Errc::empty_group, "quantile of empty data");
  if (n == 1) return sorted_values[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

FiveNumberSummary five_number_summary(std::span<const double> values) {
  if (values.empty()) raise(Errc::empty_group, "five-number summary of empty group");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  FiveNumberSummary s;
  s.n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_type7(sorted, 0.25);
  s.median = quantile_type7(sorted, 0.5);
  s.q3 = quantile_type7(sorted, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.max;
  s.whisker_high = s.min;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      s.whisker_low = std::min(s.whisker_low, v);
      s.whisker_high = std::max(s.whisker_high, v);
    }
  }
  return s;
}

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMarginX = 60.0;
constexpr double kMarginY = 40.0;

struct Scale {
  double lo;
  double hi;
  double map(double v) const {
    const double span = hi - lo;
    const double u = span > 0.0 ? (v - lo) / span : 0.5;
    return kHeight - kMarginY - u * (kHeight - 2.0 * kMarginY);
  }
};

void text(std::string& svg, double x, double y, const std::string& content,
          const char* anchor = "start") {
  svg += "<text x=\"" + fmt6(x) + "\" y=\"" + fmt6(y) + "\" font-size=\"10\" text-anchor=\"" +
         anchor + "\" font-family=\"sans-serif\">" + content + "</text>\n";
}

void line(std::string& svg, double x1, double y1, double x2, double y2) {
  svg += "<line x1=\"" + fmt6(x1) + "\" y1=\"" + fmt6(y1) + "\" x2=\"" + fmt6(x2) + "\" y2=\"" +
         fmt6(y2) + "\" stroke=\"black\"/>\n";
}

}  // namespace

BoxplotArtifact emit_boxplot(const std::vector<BoxplotGroup>& groups, const std::string& title) {
  if (groups.empty()) raise(Errc::empty_group, "no groups to plot");
  std::vector<FiveNumberSummary> summaries;
  for (const auto& g : groups) summaries.push_back(five_number_summary(g.values));

  BoxplotArtifact artifact;
  artifact.csv = "group,n,min,q1,median,q3,max,whisker_low,whisker_high,outliers\n";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& s = summaries[i];
    artifact.csv += groups[i].label + ',' + std::to_string(s.n) + ',' + fmt6(s.min) + ',' +
                    fmt6(s.q1) + ',' + fmt6(s.median) + ',' + fmt6(s.q3) + ',' + fmt6(s.max) +
                    ',' + fmt6(s.whisker_low) + ',' + fmt6(s.whisker_high) + ',';
    for (std::size_t k = 0; k < s.outliers.size(); ++k) {
      if (k) artifact.csv += ';';
      artifact.csv += fmt6(s.outliers[k]);
    }
    artifact.csv += '\n';
  }

  Scale scale{summaries[0].min, summaries[0].max};
  for (const auto& s : summaries) {
    scale.lo = std::min(scale.lo, s.min);
    scale.hi = std::max(scale.hi, s.max);
  }
  if (scale.hi == scale.lo) {
    scale.lo -= 1.0;
    scale.hi += 1.0;
  }

  std::string& svg = artifact.svg;
  svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt6(kWidth) + "\" height=\"" +
        fmt6(kHeight) + "\" viewBox=\"0 0 " + fmt6(kWidth) + " " + fmt6(kHeight) + "\">\n";
  text(svg, kWidth / 2.0, 20.0, title, "middle");

  const double slot = (kWidth - 2.0 * kMarginX) / static_cast<double>(groups.size());
  const double box_w = std::min(70.0, slot * 0.4);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& s = summaries[i];
    const double cx = kMarginX + slot * (static_cast<double>(i) + 0.5);
    const double y_q1 = scale.map(s.q1);
    const double y_q3 = scale.map(s.q3);
    const double y_med = scale.map(s.median);
    const double y_wl = scale.map(s.whisker_low);
    const double y_wh = scale.map(s.whisker_high);

    svg += "<rect x=\"" + fmt6(cx - box_w / 2.0) + "\" y=\"" + fmt6(y_q3) + "\" width=\"" +
           fmt6(box_w) + "\" height=\"" + fmt6(y_q1 - y_q3) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    line(svg, cx - box_w / 2.0, y_med, cx + box_w / 2.0, y_med);
    line(svg, cx, y_q1, cx, y_wl);
    line(svg, cx, y_q3, cx, y_wh);
    line(svg, cx - box_w / 4.0, y_wl, cx + box_w / 4.0, y_wl);
    line(svg, cx - box_w / 4.0, y_wh, cx + box_w / 4.0, y_wh);
    for (double outlier : s.outliers) {
      svg += "<circle cx=\"" + fmt6(cx) + "\" cy=\"" + fmt6(scale.map(outlier)) +
             "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
      text(svg, cx + box_w / 2.0 + 6.0, scale.map(outlier) + 3.0, fmt6(outlier));
    }

    const double lx = cx + box_w / 2.0 + 6.0;
    text(svg, lx, y_med + 3.0, fmt6(s.median));
    text(svg, lx, y_q1 + 3.0, fmt6(s.q1));
    text(svg, lx, y_q3 + 3.0, fmt6(s.q3));
    text(svg, lx, y_wl + 3.0, fmt6(s.whisker_low));
    text(svg, lx, y_wh + 3.0, fmt6(s.whisker_high));
    text(svg, cx, kHeight - kMarginY + 16.0, groups[i].label, "middle");
  }
  svg += "</svg>\n";
  return artifact;
}

}  // namespace gaitkit
