// Monte Carlo calibration of the A^2 critical values under the fully
// specified standard normal null. Prints the table pasted into
// src/backtest.cpp. Usage: ad_calibrate [reps] [seed]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "osvol/backtest.hpp"

int main(int argc, char** argv) {
  const std::size_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100000;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20240117;
  const std::size_t sizes[] = {100, 500, 2000};
  const double levels[] = {0.15, 0.10, 0.05, 0.025, 0.01};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z01(0.0, 1.0);

  std::printf("reps = %zu seed = %llu\n", reps,
              static_cast<unsigned long long>(seed));
  for (std::size_t n : sizes) {
    std::vector<double> stats(reps);
    std::vector<double> sample(n);
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t i = 0; i < n; ++i) sample[i] = z01(rng);
      stats[r] = osvol::backtest::ad_statistic(sample);
    }
    std::sort(stats.begin(), stats.end());
    std::printf("n = %zu: {", n);
    for (std::size_t j = 0; j < 5; ++j) {
      const double q = 1.0 - levels[j];
      auto idx = static_cast<std::size_t>(q * static_cast<double>(reps));
      if (idx >= reps) idx = reps - 1;
      std::printf("%s%.4f", j ? ", " : "", stats[idx]);
    }
    std::printf("},\n");
  }
  return 0;
}
