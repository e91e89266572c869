#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "monogeo/scene_sim.hpp"
#include "monogeo/stats.hpp"

using namespace monogeo;

namespace {

// Type-7 by hand: h = (n-1) q, interpolate between floor(h) and floor(h)+1.
double hand_quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

TEST_CASE("mean and sample deviation") {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(xs) == 5);
  CHECK(sample_stddev(xs) == doctest::Approx(std::sqrt(32.0 / 7)));
  // Compensated summation survives catastrophic cancellation.
  const std::vector<double> hard{1e16, 1, -1e16, 1};
  CHECK(mean(hard) == 0.5);
}

TEST_CASE("standardize") {
  const std::vector<double> xs{1, 2, 3};
  const auto s = standardize(xs);
  CHECK(std::abs(mean(s)) < 1e-12);
  CHECK(std::abs(sample_stddev(s) - 1) < 1e-12);
  CHECK(s[0] == doctest::Approx(-1));

  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> d(0, 1);
  std::vector<double> r(1000);
  for (auto& v : r) v = 40 * d(rng);
  const auto once = standardize(r);
  const auto twice = standardize(once);
  double diff = 0;
  for (std::size_t i = 0; i < r.size(); ++i) diff = std::max(diff, std::abs(once[i] - twice[i]));
  CHECK(diff < 1e-12);

  const std::vector<double> flat{4, 4, 4};
  CHECK_THROWS_AS(standardize(flat), DegenerateError);
  const std::vector<double> single{4};
  CHECK_THROWS_AS(standardize(single), ContractError);
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto b = boxplot_summary(nine);
  CHECK(b.median == 5);
  CHECK(b.q1 == 3);
  CHECK(b.q3 == 7);
  CHECK(b.iqr == 4);
  CHECK(b.outlier_count == 0);
  CHECK(b.whisker_low == 1);
  CHECK(b.whisker_high == 9);

  const std::vector<double> xs{7.5, 1, 30, 0.5, 2, 9, 1, 7};
  CHECK(quantile(xs, 0.25) == doctest::Approx(1.0));
  CHECK(quantile(xs, 0.5) == doctest::Approx(4.5));
  CHECK(quantile(xs, 0.75) == doctest::Approx(7.875));
  CHECK(quantile(xs, 0.10) == doctest::Approx(0.85));
  CHECK(quantile(xs, 0.0) == 0.5);
  CHECK(quantile(xs, 1.0) == 30);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> d(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(5 + trial * 7);
    for (auto& v : r) v = d(rng);
    for (double q : {0.01, 0.25, 0.5, 0.63, 0.75, 0.99}) CHECK(quantile(r, q) == doctest::Approx(hand_quantile(r, q)));
  }
  CHECK_THROWS_AS(quantile(xs, 1.5), ContractError);
  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), ContractError);
}

TEST_CASE("skewness") {
  CHECK(skewness(std::vector<double>{1, 2, 3, 10}) == doctest::Approx(1.763632614803888).epsilon(1e-12));
  CHECK(skewness(std::vector<double>{0.5, 1, 1, 2, 7, 7.5, 9, 30}) == doctest::Approx(2.195018012622388));
  const std::vector<double> sym{-3, -1, -0.5, 0, 0.5, 1, 3};
  CHECK(std::abs(skewness(sym)) < 1e-12);
  CHECK(std::abs(boxplot_summary(sym).skewness) < 1e-12);
}

TEST_CASE("Tukey fences and outliers") {
  std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 40};
  const auto b = boxplot_summary(xs);
  // q1 = 3.25, q3 = 7.75, upper fence 14.5.
  CHECK(b.q1 == doctest::Approx(3.25));
  CHECK(b.q3 == doctest::Approx(7.75));
  CHECK(b.outlier_count == 1);
  CHECK(b.whisker_high == 9);
  CHECK(b.whisker_low == 1);
  CHECK(b.max == 40);
  CHECK_THROWS_AS(boxplot_summary(std::vector<double>{1, 2, 3}), ContractError);
}

TEST_CASE("boxplot invariants and permutation invariance") {
  std::mt19937_64 rng(12);
  std::gamma_distribution<double> g(2, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(4 + trial * 3);
    for (auto& v : xs) v = g(rng);
    const auto a = boxplot_summary(xs);
    CHECK(a.q1 <= a.median);
    CHECK(a.median <= a.q3);
    CHECK(a.iqr >= 0);
    CHECK(a.whisker_low >= a.min);
    CHECK(a.whisker_high <= a.max);
    std::shuffle(xs.begin(), xs.end(), rng);
    const auto b = boxplot_summary(xs);
    CHECK(a.median == b.median);
    CHECK(a.q1 == b.q1);
    CHECK(a.q3 == b.q3);
    CHECK(a.whisker_low == b.whisker_low);
    CHECK(a.whisker_high == b.whisker_high);
    CHECK(a.outlier_count == b.outlier_count);
    CHECK(a.skewness == doctest::Approx(b.skewness).epsilon(1e-12));
  }
}

TEST_CASE("histogram") {
  const std::vector<double> xs{0.1, 0.4, 0.9, 2.0, 3.3};
  const auto one = histogram(xs, 1);
  REQUIRE(one.counts.size() == 1);
  CHECK(one.counts[0] == 5);

  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(i + 0.5);
  const auto h = histogram(grid, 10);
  REQUIRE(h.edges.size() == 11);
  for (auto c : h.counts) CHECK(c == 10);
  for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);

  const std::vector<double> edge{0, 1, 2, 3, 4};
  const auto e = histogram(edge, 4);
  CHECK(e.counts == std::vector<long long>{1, 1, 1, 2});  // 1,2,3 go right; 4 closes the last bin

  const std::vector<double> flat{2, 2, 2};
  const auto f = histogram(flat, 3);
  CHECK(std::accumulate(f.counts.begin(), f.counts.end(), 0LL) == 3);
  CHECK(f.edges.front() < 2);
  CHECK(f.edges.back() > 2);

  CHECK_THROWS_AS(histogram(xs, 0), ContractError);
  CHECK_THROWS_AS(histogram(std::vector<double>{}, 3), ContractError);

  const auto w = histogram_by_width(grid, 25);
  CHECK(std::accumulate(w.counts.begin(), w.counts.end(), 0LL) == 100);
  CHECK_THROWS_AS(histogram_by_width(grid, 0), ContractError);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> d;
  std::vector<double> r(12345);
  for (auto& v : r) v = d(rng);
  for (int bins : {1, 7, 64, 1000}) {
    const auto hr = histogram(r, bins);
    CHECK(std::accumulate(hr.counts.begin(), hr.counts.end(), 0LL) == 12345);
  }
}

TEST_CASE("difficulty report on a synthetic fleet") {
  FleetConfig cfg;
  const auto fleet = sample_fleet(11, 5000, cfg);
  const auto rep = difficulty_report(fleet);
  REQUIRE(rep.attributes.size() == kDifficultyAttributes.size());
  CHECK(rep.record_count == 5000);
  CHECK(rep.at("Z").raw_iqr > rep.at("Z_err").raw_iqr);
  CHECK(rep.ranking.size() == 6);
  CHECK(rep.median_Z_err == doctest::Approx(median(attribute_values(fleet, "Z_err"))));
  for (const auto& a : rep.attributes) {
    const double sd = sample_stddev(attribute_values(fleet, a.name));
    CHECK(a.standardized.iqr == doctest::Approx(a.raw_iqr / sd).epsilon(1e-9));
  }
}

TEST_CASE("difficulty report with constant dimensions") {
  FleetConfig cfg;
  cfg.height.stddev = 0;
  cfg.width.stddev = 0;
  cfg.length.stddev = 0;
  const auto rep = difficulty_report(sample_fleet(1, 300, cfg));
  CHECK(rep.at("H").constant);
  CHECK(rep.at("H").standardized.iqr == 0);
  CHECK(rep.at("H").raw_iqr == 0);
}

TEST_CASE("difficulty report ranking and expected order") {
  // Unrelated random records: only the sort rule of the ranking is checked.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<GeometryRecord> recs;
  for (int i = 0; i < 400; ++i) recs.push_back(make_geometry_record(720.0, 1.5 + 0.1 * u(rng), 30 + 20 * u(rng), 5 + 50 * u(rng)));
  const auto rep = difficulty_report(recs);
  REQUIRE(rep.ranking.size() == 6);
  for (std::size_t i = 1; i < rep.ranking.size(); ++i) {
    const auto& prev = rep.at(rep.ranking[i - 1]).standardized;
    const auto& cur = rep.at(rep.ranking[i]).standardized;
    CHECK((prev.iqr > cur.iqr || (prev.iqr == cur.iqr && prev.whisker_span() >= cur.whisker_span())));
  }
  CHECK_THROWS_AS(difficulty_report(std::span<const GeometryRecord>(recs.data(), 99)), ContractError);
  CHECK_THROWS_AS(rep.at("nope"), ContractError);
  CHECK_THROWS_AS(attribute_values(recs, "nope"), ContractError);
}
