#include "monogeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace monogeo {

namespace {

class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

double quantile_sorted(const std::vector<double>& s, double q) {
  const double h = (static_cast<double>(s.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

double mean(std::span<const double> xs) {
  detail::require(!xs.empty(), "mean: empty series");
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  detail::require(xs.size() >= 2, "sample_stddev: need at least 2 values");
  const double m = mean(xs);
  NeumaierSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return std::sqrt(s.value() / static_cast<double>(xs.size() - 1));
}

double quantile(std::span<const double> xs, double q) {
  detail::require(!xs.empty(), "quantile: empty series");
  detail::require(q >= 0 && q <= 1, "quantile: q outside [0,1]");
  return quantile_sorted(sorted_copy(xs), q);
}

double median(std::span<const double> xs) { return quantile(xs, 0.5); }

double skewness(std::span<const double> xs) {
  detail::require(xs.size() >= 3, "skewness: need at least 3 values");
  const double n = static_cast<double>(xs.size());
  const double m = mean(xs);
  NeumaierSum m2;
  NeumaierSum m3;
  for (double x : xs) {
    const double d = x - m;
    m2.add(d * d);
    m3.add(d * d * d);
  }
  const double var = m2.value() / n;
  if (var == 0) return 0;
  const double g1 = (m3.value() / n) / std::pow(var, 1.5);
  return g1 * std::sqrt(n * (n - 1)) / (n - 2);
}

std::vector<double> standardize(std::span<const double> xs) {
  detail::require(xs.size() >= 2, "standardize: need at least 2 values");
  const double m = mean(xs);
  const double sd = sample_stddev(xs);
  if (!(sd > 0)) throw DegenerateError("standardize: zero variance");
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((x - m) / sd);
  return out;
}

BoxplotSummary boxplot_summary(std::span<const double> xs) {
  detail::require(xs.size() >= 4, "boxplot_summary: need at least 4 values");
  const auto s = sorted_copy(xs);
  BoxplotSummary b;
  b.min = s.front();
  b.max = s.back();
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  b.iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - kTukeyFence * b.iqr;
  const double hi_fence = b.q3 + kTukeyFence * b.iqr;
  b.whisker_low = *std::lower_bound(s.begin(), s.end(), lo_fence);
  b.whisker_high = *(std::upper_bound(s.begin(), s.end(), hi_fence) - 1);
  for (double x : s) {
    if (x < lo_fence || x > hi_fence) ++b.outlier_count;
  }
  b.skewness = skewness(s);
  return b;
}

namespace {

Histogram bin_series(std::span<const double> xs, double lo, double width, int bins) {
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double x : xs) {
    // Locate by edges, not by division, so that boundary values land in the
    // right-hand bin consistently.
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
    std::ptrdiff_t idx = (it - h.edges.begin()) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

}  // namespace

Histogram histogram(std::span<const double> xs, int bins) {
  detail::require(!xs.empty(), "histogram: empty series");
  detail::require(bins >= 1, "histogram: bins must be >= 1");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  double lo = *mn;
  double hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h = bin_series(xs, lo, (hi - lo) / bins, bins);
  h.edges.back() = hi;
  return h;
}

Histogram histogram_by_width(std::span<const double> xs, double bin_width) {
  detail::require(!xs.empty(), "histogram: empty series");
  detail::require(bin_width > 0, "histogram: bin width must be positive");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  const double lo = std::floor(*mn / bin_width) * bin_width;
  const int bins = std::max(1, static_cast<int>(std::floor((*mx - lo) / bin_width)) + 1);
  return bin_series(xs, lo, bin_width, bins);
}

std::vector<double> attribute_values(std::span<const GeometryRecord> records, const std::string& name) {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    if (name == "Z") v.push_back(r.Z_gt);
    else if (name == "h_err") v.push_back(r.h_err);
    else if (name == "H_err") v.push_back(r.H_err);
    else if (name == "Z_err") v.push_back(r.Z_err);
    else if (name == "H") v.push_back(r.H);
    else if (name == "h_bbox") v.push_back(r.h_bbox);
    else if (name == "h_c") v.push_back(r.h_c);
    else if (name == "Z_geo") v.push_back(r.Z_geo);
    else if (name == "f") v.push_back(r.f);
    else throw ContractError("attribute_values: unknown attribute '" + name + "'");
  }
  return v;
}

const AttributeStats& DifficultyReport::at(const std::string& name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return a;
  }
  throw ContractError("DifficultyReport: no attribute '" + name + "'");
}

DifficultyReport difficulty_report(std::span<const GeometryRecord> records) {
  detail::require(records.size() >= kMinReportRecords,
                  "difficulty_report: need at least " + std::to_string(kMinReportRecords) + " records, got " +
                      std::to_string(records.size()));
  DifficultyReport rep;
  rep.record_count = records.size();
  for (const auto& name : kDifficultyAttributes) {
    const auto raw = attribute_values(records, name);
    AttributeStats a;
    a.name = name;
    const auto raw_box = boxplot_summary(raw);
    a.raw_median = raw_box.median;
    a.raw_iqr = raw_box.iqr;
    if (sample_stddev(raw) > 0) {
      a.standardized = boxplot_summary(standardize(raw));
    } else {
      a.constant = true;
    }
    rep.attributes.push_back(a);
  }
  rep.median_Z_err = rep.at("Z_err").raw_median;
  rep.median_H_err = rep.at("H_err").raw_median;

  std::vector<const AttributeStats*> order;
  for (const auto& a : rep.attributes) order.push_back(&a);
  std::stable_sort(order.begin(), order.end(), [](const AttributeStats* a, const AttributeStats* b) {
    if (a->standardized.iqr != b->standardized.iqr) return a->standardized.iqr > b->standardized.iqr;
    return a->standardized.whisker_span() > b->standardized.whisker_span();
  });
  for (const auto* a : order) rep.ranking.push_back(a->name);

  // Z_err and H (positions 3 and 4) may appear in either order.
  std::vector<std::string> swapped = kDifficultyAttributes;
  std::swap(swapped[3], swapped[4]);
  rep.matches_expected_order = rep.ranking == kDifficultyAttributes || rep.ranking == swapped;
  return rep;
}

}  // namespace monogeo
