#pragma once

#include <span>
#include <string>
#include <vector>

namespace gaitkit {

// Five-number summary with Tukey whiskers. Quartiles use linear
// interpolation between order statistics (type 7).
struct FiveNumberSummary {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;   // smallest point >= q1 - 1.5 IQR
  double whisker_high = 0.0;  // largest point <= q3 + 1.5 IQR
  std::vector<double> outliers;
};

FiveNumberSummary five_number_summary(std::span<const double> values);

double quantile_type7(std::span<const double> sorted_values, double p);

struct BoxplotGroup {
  std::string label;
  std::vector<double> values;
};

struct BoxplotArtifact {
  std::string svg;
  std::string csv;  // one row per group: the five-number summary + whiskers + outliers
};

// Side-by-side box plots on a shared scale. Every numeric label drawn in the
// SVG is a value from the backing CSV, printed with the same formatting.
BoxplotArtifact emit_boxplot(const std::vector<BoxplotGroup>& groups, const std::string& title);

}  // namespace gaitkit
