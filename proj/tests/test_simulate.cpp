#include "osvol/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <numeric>

#include "doctest.h"
#include "osvol/estimators.hpp"

using namespace osvol;
using namespace osvol::sim;

TEST_CASE("merton with no jumps reduces to scaled Brownian increments") {
  MertonParams prm;
  prm.lambda = 0.0;
  const auto path = simulate_merton(prm, 200000, 20.0, 7);
  const double dt = 20.0 / 200000.0;
  CHECK(path.increments.dt == doctest::Approx(dt));
  CHECK(sample_variance(path.increments) ==
        doctest::Approx(prm.sigma * prm.sigma * dt).epsilon(0.02));
  for (char f : path.true_flags) CHECK(f == 0);
}

TEST_CASE("merton determinism and jump bookkeeping") {
  MertonParams prm;
  const auto a = simulate_merton(prm, 5000, 20.0, 1234);
  const auto b = simulate_merton(prm, 5000, 20.0, 1234);
  CHECK(a.increments.values == b.increments.values);
  CHECK(a.true_jump_sizes == b.true_jump_sizes);

  for (std::size_t i = 0; i < a.true_flags.size(); ++i) {
    CHECK(static_cast<bool>(a.true_flags[i]) ==
          (a.true_jump_sizes[i] != 0.0));
  }

  // Poisson(lambda T) total jump count: lambda T = 200.
  double mean_count = 0.0;
  const int paths = 50;
  for (int m = 0; m < paths; ++m) {
    const auto p = simulate_merton(prm, 5000, 20.0, path_seed(88, m));
    std::size_t jumps = 0;
    for (char f : p.true_flags) jumps += f ? 1 : 0;
    mean_count += static_cast<double>(jumps);
  }
  mean_count /= paths;
  // Step-level flags undercount multi-jump steps slightly; lambda T = 200
  // with about 4 expected collisions per path.
  CHECK(mean_count > 200.0 - 3.0 * std::sqrt(200.0 / paths) - 6.0);
  CHECK(mean_count < 200.0 + 3.0 * std::sqrt(200.0 / paths));
}

TEST_CASE("merton increment variance matches the compound-Poisson moments") {
  MertonParams prm;
  double acc = 0.0;
  const int paths = 40;
  for (int m = 0; m < paths; ++m) {
    const auto p = simulate_merton(prm, 5000, 20.0, path_seed(13, m));
    acc += sample_variance(p.increments);
  }
  const double dt = 0.004;
  const double expect =
      (prm.sigma * prm.sigma +
       prm.lambda * (prm.mu * prm.mu + prm.delta * prm.delta)) *
      dt;
  CHECK(acc / paths == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("vgbm reproducibility and moments") {
  VgBmParams prm;
  const auto a = simulate_vgbm(prm, 5000, 20.0, 99);
  const auto b = simulate_vgbm(prm, 5000, 20.0, 99);
  CHECK(a.increments.values == b.increments.values);

  // Infinite-activity part jumps at every step.
  std::size_t flagged = 0;
  for (char f : a.true_flags) flagged += f ? 1 : 0;
  CHECK(flagged == a.true_flags.size());

  double acc = 0.0;
  const int paths = 40;
  for (int m = 0; m < paths; ++m) {
    const auto p = simulate_vgbm(prm, 5000, 20.0, path_seed(14, m));
    acc += sample_variance(p.increments);
  }
  const double dt = 0.004;
  const double expect = (prm.sigma * prm.sigma + prm.beta * prm.beta) * dt;
  CHECK(acc / paths == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("vgbm subordinator increments are nonnegative") {
  VgBmParams prm;
  prm.alpha = 1.0;
  prm.beta = 0.0;  // VG increment = alpha * dV, so signs expose dV
  prm.sigma = 0.0;
  const auto p = simulate_vgbm(prm, 2000, 8.0, 5);
  double cumulative = 0.0;
  for (double v : p.true_jump_sizes) {
    CHECK(v >= 0.0);
    const double next = cumulative + v;
    CHECK(next >= cumulative);
    cumulative = next;
  }
}

TEST_CASE("path_seed decorrelates indices") {
  CHECK(path_seed(1, 0) != path_seed(1, 1));
  CHECK(path_seed(1, 0) != path_seed(2, 0));
  CHECK(path_seed(1, 5) == path_seed(1, 5));
}

TEST_CASE("simulate parameter validation") {
  MertonParams bad;
  bad.sigma = -1.0;
  CHECK_THROWS_AS(simulate_merton(bad, 10, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_merton(MertonParams{}, 0, 1.0, 1),
                  std::invalid_argument);
  VgBmParams badvg;
  badvg.k_var = 0.0;
  CHECK_THROWS_AS(simulate_vgbm(badvg, 10, 1.0, 1), std::invalid_argument);
}
