#include "osvol/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"

using namespace osvol;
using namespace osvol::backtest;
using osvol::var::WeightedLossDistribution;

TEST_CASE("percentile_rank boundaries and scan agreement") {
  WeightedLossDistribution d({-1.0, 0.0, 2.0}, {0.2, 0.3, 0.5});
  CHECK(percentile_rank(d, -5.0) == 0.0);
  CHECK(percentile_rank(d, 5.0) == 1.0);
  CHECK(percentile_rank(d, 0.0) == doctest::Approx(0.5));

  // Median of an odd uniform support: 0.5 + 1/(2N).
  std::vector<double> support(9);
  std::iota(support.begin(), support.end(), 1.0);
  WeightedLossDistribution uni(support, std::vector<double>(9, 1.0 / 9.0));
  CHECK(percentile_rank(uni, 5.0) == doctest::Approx(0.5 + 1.0 / 18.0));

  double prev = -1.0;
  for (double x = -2.0; x < 3.0; x += 0.1) {
    const double r = percentile_rank(d, x);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("uniformity_deviation") {
  RankSeries exact;
  for (int i = 1; i <= 50; ++i) exact.ranks.push_back(i / 50.0);
  const auto res = uniformity_deviation(exact, 100);
  for (double d : res.deviations) CHECK(d <= 1.0 / 50.0 + 1e-12);

  RankSeries half;
  half.ranks.assign(20, 0.5);
  const auto res2 = uniformity_deviation(half, 100);
  CHECK(res2.grid[24] == doctest::Approx(0.25));
  CHECK(res2.deviations[24] == doctest::Approx(0.25));

  // Mean deviation is permutation invariant.
  RankSeries shuffled = exact;
  std::mt19937_64 rng(4);
  std::shuffle(shuffled.ranks.begin(), shuffled.ranks.end(), rng);
  CHECK(uniformity_deviation(shuffled, 100).mean_abs ==
        doctest::Approx(res.mean_abs));
}

TEST_CASE("uniformity_deviation on many uniform draws is small") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RankSeries rs;
  rs.ranks.resize(100000);
  for (auto& r : rs.ranks) r = unif(rng);
  CHECK(uniformity_deviation(rs, 100).mean_abs < 0.005);
}

TEST_CASE("ad_statistic null distribution and power") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;

  // Rejection frequency at the 15% level over repeated null samples.
  int rejects = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> xs(500);
    for (auto& v : xs) v = z(rng);
    if (ad_test(xs, 0.15).reject) ++rejects;
  }
  const double rate = static_cast<double>(rejects) / reps;
  CHECK(rate > 0.15 - 3.0 * std::sqrt(0.15 * 0.85 / reps));
  CHECK(rate < 0.15 + 3.0 * std::sqrt(0.15 * 0.85 / reps));

  // Location shift is detected.
  std::vector<double> shifted(2000);
  for (auto& v : shifted) v = z(rng) + 1.0;
  CHECK(ad_test(shifted, 0.15).reject);

  // Fat tails (t with 3 degrees of freedom) are detected.
  std::student_t_distribution<double> t3(3.0);
  std::vector<double> fat(2000);
  for (auto& v : fat) v = t3(rng);
  CHECK(ad_test(fat, 0.15).reject);
}

TEST_CASE("ad_statistic standardization by the true moments restores the null") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> z;
  int rejects = 0;
  const int reps = 300;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> xs(500);
    for (auto& v : xs) v = (3.0 + 2.0 * z(rng) - 3.0) / 2.0;
    if (ad_test(xs, 0.15).reject) ++rejects;
  }
  const double rate = static_cast<double>(rejects) / reps;
  CHECK(std::fabs(rate - 0.15) < 3.0 * std::sqrt(0.15 * 0.85 / reps));
}

TEST_CASE("ad_test edge cases") {
  CHECK_THROWS_AS(ad_test({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, 0.5),
                  std::domain_error);
  CHECK_THROWS_AS(ad_statistic({1.0, 2.0}), std::domain_error);

  // A constant sample is rejected outright.
  const auto res = ad_test(std::vector<double>(100, 0.0), 0.15);
  CHECK(res.reject);
  CHECK(res.statistic > 30.0);

  // Extreme observations hit the clamp but still produce a statistic.
  std::vector<double> xs(100, 0.0);
  std::mt19937_64 rng(14);
  std::normal_distribution<double> z;
  for (auto& v : xs) v = z(rng);
  xs[0] = -45.0;
  bool clamped = false;
  const double a2 = ad_statistic(xs, &clamped);
  CHECK(clamped);
  CHECK(std::isfinite(a2));
}

TEST_CASE("exception_count") {
  CHECK(exception_count({1e300, 1e300}, {5.0, -2.0}) == 0);
  CHECK(exception_count({-1e300, -1e300}, {5.0, -2.0}) == 2);
  CHECK(exception_count({1.0, 2.0, 3.0}, {2.0, 1.0, 3.5}) == 2);
  CHECK_THROWS_AS(exception_count({1.0}, {1.0, 2.0}), std::domain_error);
}

TEST_CASE("exception rate of a calibrated VaR sits in the binomial band") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> z;
  const std::size_t days = 10000;
  std::vector<double> losses(days);
  for (auto& l : losses) l = z(rng);

  BacktestConfig cfg;
  cfg.model = VarModel::hvar;
  cfg.hvar_window = 1000;
  cfg.lambda_tail = 0.01;
  const auto report = rolling_backtest(losses, {}, {}, cfg);
  const double n_dates = static_cast<double>(report.rows.size());
  const double expect = 0.01 * n_dates;
  const double sd = std::sqrt(n_dates * 0.01 * 0.99);
  CHECK(std::fabs(static_cast<double>(report.exceptions) - expect) <
        3.5 * sd);
}

TEST_CASE("rolling_backtest ranks are uniform for an iid series") {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> z;
  std::vector<double> losses(3000);
  std::vector<double> vols(3000, 1.0);
  std::vector<char> flags(3000, 0);
  for (auto& l : losses) l = z(rng);

  BacktestConfig cfg;
  cfg.model = VarModel::fvar;
  cfg.jv = var::JumpingVarConfig(250, 60, 0.99);
  cfg.lambda_tail = 0.01;
  const auto report = rolling_backtest(losses, vols, flags, cfg);
  CHECK(report.uniformity.mean_abs < 0.03);
  CHECK_FALSE(report.ad.reject);
}
