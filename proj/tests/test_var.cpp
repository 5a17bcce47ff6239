#include "osvol/var.hpp"

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"

using namespace osvol::var;

TEST_CASE("normalize_losses") {
  LossWindow w;
  w.losses = {2.0, 3.0};
  w.vols = {2.0, 3.0};
  const auto out = normalize_losses(w);
  CHECK(out == std::vector<double>{1.0, 1.0});

  LossWindow c;
  c.losses = {4.0, -2.0, 6.0};
  c.vols = {2.0, 2.0, 2.0};
  const auto scaled = normalize_losses(c);
  CHECK(scaled == std::vector<double>{2.0, -1.0, 3.0});

  LossWindow bad = w;
  bad.vols[1] = 0.0;
  CHECK_THROWS_AS(normalize_losses(bad), std::domain_error);
}

TEST_CASE("normalization passes a split-sample variance-ratio check") {
  // Regime switch: the raw series fails homogeneity, the filtered one passes.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  const std::size_t n = 4000;
  LossWindow w;
  for (std::size_t i = 0; i < n; ++i) {
    const double vol = i < n / 2 ? 1.0 : 3.0;
    w.vols.push_back(vol);
    w.losses.push_back(vol * z(rng));
  }
  auto split_ratio = [&](const std::vector<double>& xs) {
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t i = 0; i < n / 2; ++i) v1 += xs[i] * xs[i];
    for (std::size_t i = n / 2; i < n; ++i) v2 += xs[i] * xs[i];
    return v2 / v1;
  };
  CHECK(split_ratio(w.losses) > 4.0);
  const double filtered = split_ratio(normalize_losses(w));
  CHECK(filtered > 0.8);
  CHECK(filtered < 1.25);
}

TEST_CASE("jump_probability_forecast") {
  CHECK(jump_probability_forecast(std::vector<char>(80, 0), 60) == 0.0);
  CHECK(jump_probability_forecast(std::vector<char>(80, 1), 60) == 1.0);
  std::vector<char> flags(100, 0);
  flags[97] = flags[98] = flags[99] = 1;
  CHECK(jump_probability_forecast(flags, 60) == doctest::Approx(0.05));
  CHECK_THROWS_AS(jump_probability_forecast(std::vector<char>(10, 0), 60),
                  std::domain_error);
}

TEST_CASE("occurrence_weights direct arithmetic") {
  // N = 100 with 10 jumps, forecast 0.2: alpha/N = 0.02, beta/N ~ 0.008889.
  std::vector<char> flags(100, 0);
  for (int i = 0; i < 10; ++i) flags[i * 7] = 1;
  const auto w = occurrence_weights(flags, 0.2);
  CHECK_FALSE(w.degenerate_fallback);
  double total = 0.0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) {
      CHECK(w.weights[i] == doctest::Approx(0.02).epsilon(1e-12));
    } else {
      CHECK(w.weights[i] == doctest::Approx(0.8 / 90.0).epsilon(1e-10));
    }
    total += w.weights[i];
  }
  CHECK(std::fabs(total - 1.0) <= 1e-12);
}

TEST_CASE("occurrence_weights fixed point and degenerate cases") {
  std::vector<char> flags(50, 0);
  flags[3] = flags[30] = 1;
  const double p_hist = 2.0 / 50.0;
  const auto fixed = occurrence_weights(flags, p_hist);
  for (double w : fixed.weights) {
    CHECK(w == doctest::Approx(1.0 / 50.0).epsilon(1e-12));
  }

  // Zero forecast: jump losses drop out, the rest share uniformly.
  const auto zeroed = occurrence_weights(flags, 0.0);
  CHECK(zeroed.weights[3] == 0.0);
  CHECK(zeroed.weights[0] == doctest::Approx(1.0 / 48.0).epsilon(1e-10));

  // No jump history but a positive forecast: uniform fallback.
  const auto fallback = occurrence_weights(std::vector<char>(50, 0), 0.3);
  CHECK(fallback.degenerate_fallback);
  for (double w : fallback.weights) {
    CHECK(w == doctest::Approx(1.0 / 50.0).epsilon(1e-12));
  }
  // All-jump history: also degenerate.
  CHECK(occurrence_weights(std::vector<char>(50, 1), 0.5).degenerate_fallback);
}

TEST_CASE("weighted_quantile conventions") {
  WeightedLossDistribution d({-5.0, 1.0}, {0.01, 0.99});
  CHECK(weighted_quantile(d, 0.01) == -5.0);
  CHECK(weighted_quantile(d, 0.02) == 1.0);

  // Uniform weights agree with the plain empirical quantile convention.
  std::vector<double> support(100);
  std::iota(support.begin(), support.end(), 1.0);
  WeightedLossDistribution uni(support, std::vector<double>(100, 0.01));
  CHECK(weighted_quantile(uni, 0.5) == 50.0);
  CHECK(weighted_quantile(uni, 0.99) == 99.0);
  CHECK(weighted_quantile(uni, 0.999) == 100.0);
}

TEST_CASE("weighted_quantile agrees with a brute-force CDF scan") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 40;
    std::vector<double> support(n), weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      support[i] = unif(rng) * 10.0 - 5.0;
      weights[i] = unif(rng) + 0.01;
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
    double rounding = 0.0;
    for (double w : weights) rounding += w;
    weights.back() += 1.0 - rounding;
    WeightedLossDistribution d(support, weights);
    const double lambda = 0.05 + 0.9 * unif(rng);

    // Exhaustive scan over the sorted support.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return support[a] < support[b];
    });
    double cum = 0.0;
    double expect = support[order.back()];
    for (std::size_t idx : order) {
      cum += weights[idx];
      if (cum + 1e-12 >= lambda) {
        expect = support[idx];
        break;
      }
    }
    CHECK(weighted_quantile(d, lambda) == expect);
  }
}

TEST_CASE("var_normalized") {
  LossWindow w;
  w.losses = {1.0, -2.0, 3.0, 0.5};
  w.vols = {2.0, 2.0, 2.0, 2.0};
  // Constant vols: reduces to the plain historical quantile.
  CHECK(var_normalized(w, 0.5) ==
        doctest::Approx(var_historical(w.losses, 4, 0.5)));

  // Doubling only the last vol doubles the VaR.
  LossWindow w2 = w;
  w2.vols.back() = 4.0;
  const std::vector<double> norm = normalize_losses(w2);
  WeightedLossDistribution d(norm, std::vector<double>(4, 0.25));
  CHECK(var_normalized(w2, 0.75) ==
        doctest::Approx(weighted_quantile(d, 0.75) * 4.0));
}

TEST_CASE("var_jumping reduces to var_normalized without jumps") {
  std::mt19937_64 rng(64);
  std::normal_distribution<double> z;
  LossWindow w;
  for (int i = 0; i < 250; ++i) {
    w.losses.push_back(z(rng));
    w.vols.push_back(1.0 + 0.1 * (i % 7));
    w.flags.push_back(0);
  }
  const JumpingVarConfig cfg(250, 60, 0.99);
  bool degenerate = false;
  const double vj = var_jumping(w, cfg, &degenerate);
  CHECK_FALSE(degenerate);
  CHECK(vj == doctest::Approx(var_normalized(w, 0.99)));
}

TEST_CASE("var_jumping upweights jump losses when the forecast is hot") {
  // One dominant jump loss inside the window and a recent cluster of jump
  // flags: the jump-aware quantile moves up, never down.
  LossWindow w;
  std::mt19937_64 rng(65);
  std::normal_distribution<double> z;
  for (int i = 0; i < 250; ++i) {
    w.losses.push_back(z(rng));
    w.vols.push_back(1.0);
    w.flags.push_back(0);
  }
  w.losses[100] = 9.0;
  w.flags[100] = 1;
  for (int i = 240; i < 250; ++i) w.flags[i] = 1;  // hot recent window
  w.losses[245] = 8.0;

  const JumpingVarConfig cfg(250, 60, 0.95);
  const double vj = var_jumping(w, cfg);
  const double vn = var_normalized(w, 0.95);
  CHECK(vj >= vn);
}

TEST_CASE("var_historical") {
  CHECK(var_historical(std::vector<double>(30, 7.0), 30, 0.5) == 7.0);
  std::vector<double> xs(100);
  std::iota(xs.begin(), xs.end(), 1.0);
  CHECK(var_historical(xs, 100, 0.5) == 50.0);
  CHECK_THROWS_AS(var_historical(xs, 200, 0.5), std::domain_error);
}

TEST_CASE("positive homogeneity of the VaR outputs") {
  std::mt19937_64 rng(66);
  std::normal_distribution<double> z;
  LossWindow w;
  for (int i = 0; i < 250; ++i) {
    w.losses.push_back(z(rng) * (1.0 + (i % 5) * 0.2));
    w.vols.push_back(1.0 + (i % 5) * 0.2);
    w.flags.push_back(i % 17 == 0);
  }
  const JumpingVarConfig cfg(250, 60, 0.99);
  const double c = 4.0;  // power of two keeps the scaling exact
  LossWindow ws = w;
  for (auto& l : ws.losses) l *= c;
  for (auto& v : ws.vols) v *= c;
  CHECK(var_jumping(ws, cfg) == doctest::Approx(c * var_jumping(w, cfg)));
  CHECK(var_normalized(ws, 0.99) ==
        doctest::Approx(c * var_normalized(w, 0.99)));
  std::vector<double> scaled_losses = w.losses;
  for (auto& l : scaled_losses) l *= c;
  CHECK(var_historical(scaled_losses, 250, 0.99) ==
        doctest::Approx(c * var_historical(w.losses, 250, 0.99)));
}

TEST_CASE("VaR nondecreasing in the quantile level") {
  std::mt19937_64 rng(67);
  std::normal_distribution<double> z;
  LossWindow w;
  for (int i = 0; i < 250; ++i) {
    w.losses.push_back(z(rng));
    w.vols.push_back(1.0);
    w.flags.push_back(i % 11 == 0);
  }
  double prev = -1e300;
  for (double lambda : {0.05, 0.25, 0.5, 0.75, 0.95, 0.99}) {
    const double v = var_jumping(w, JumpingVarConfig(250, 60, lambda));
    CHECK(v >= prev);
    prev = v;
  }
}
