#pragma once

// Distribution summaries: standardization, Tukey boxplots, histograms and
// the depth-attribute difficulty report.

#include <span>
#include <string>
#include <vector>

#include "monogeo/geodepth.hpp"

namespace monogeo {

// Compensated (Neumaier) sums keep mean and deviation order-stable.
double mean(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);

/// Type-7 (linear interpolation) quantile, q in [0,1].
double quantile(std::span<const double> xs, double q);
double median(std::span<const double> xs);

/// Adjusted Fisher-Pearson skewness G1 = g1 * sqrt(n(n-1)) / (n-2).
double skewness(std::span<const double> xs);

std::vector<double> standardize(std::span<const double> xs);

struct BoxplotSummary {
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double iqr = 0;
  double whisker_low = 0;
  double whisker_high = 0;
  int outlier_count = 0;
  double skewness = 0;
  double min = 0;
  double max = 0;

  double whisker_span() const { return whisker_high - whisker_low; }
};

inline constexpr double kTukeyFence = 1.5;
inline constexpr const char* kQuantileMethod = "type-7 linear interpolation";
inline constexpr const char* kWhiskerMethod = "Tukey 1.5*IQR";

BoxplotSummary boxplot_summary(std::span<const double> xs);

struct Histogram {
  std::vector<double> edges;  // size = counts.size() + 1
  std::vector<long long> counts;
};

/// `bins` equal-width bins over [min, max]; bins are right-open except the
/// last. A constant series gets a unit-width range centered on its value.
Histogram histogram(std::span<const double> xs, int bins);
Histogram histogram_by_width(std::span<const double> xs, double bin_width);

/// One row of the difficulty report (standardized statistics).
struct AttributeStats {
  std::string name;
  BoxplotSummary standardized;
  double raw_median = 0;
  double raw_iqr = 0;
  bool constant = false;  // zero variance; standardized stats are all zero
};

struct DifficultyReport {
  std::vector<AttributeStats> attributes;  // in kDifficultyAttributes order
  std::vector<std::string> ranking;        // hardest first: by IQR, then whisker span
  bool matches_expected_order = false;
  double median_Z_err = 0;
  double median_H_err = 0;
  std::size_t record_count = 0;

  const AttributeStats& at(const std::string& name) const;
};

// Attribute list and the expected hardest-first order; Z_err and H are
// treated as tied.
inline const std::vector<std::string> kDifficultyAttributes{"Z", "h_err", "H_err", "Z_err", "H", "h_bbox"};

inline constexpr std::size_t kMinReportRecords = 100;

DifficultyReport difficulty_report(std::span<const GeometryRecord> records);

// Column extraction by attribute name (Z maps to Z_gt).
std::vector<double> attribute_values(std::span<const GeometryRecord> records, const std::string& name);

}  // namespace monogeo
