#pragma once

#include <cstddef>
#include <vector>

namespace osvol::ordstat {

// Jump-classification tolerance level p in (0,1).
struct ToleranceLevel {
  double p;
  explicit ToleranceLevel(double p_);
};

// Rank k (1-based, increasing order) within a sample of size n_prime.
struct OrderIndex {
  std::size_t k;
  std::size_t n_prime;
  OrderIndex(std::size_t k_, std::size_t n_prime_);
};

// Standard normal c.d.f. Rejects NaN.
double normal_cdf(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation with
// the symmetry switch at x > (a+1)/(a+b+2).
double regularized_incomplete_beta(double a, double b, double x);

// C.d.f. of the k-th order statistic of n' standard normal draws,
// I_{Phi(x)}(k, n'-k+1).
double order_stat_cdf(double x, OrderIndex idx);

// theta(p; k, n'): the value t with P(Z_{k:n'} > t) = p, obtained by
// bracketed root finding on the monotone c.d.f.
double order_stat_quantile(ToleranceLevel p, OrderIndex idx);

// Fixed comparison level 2 log(1/dt) for the variance-scaled threshold
// rule |increment| <= sqrt(level * sample variance). Requires 0 < dt < 1.
double levy_modulus_threshold(double dt);

// The dt at which the fixed threshold sqrt(2 log(1/dt)) matches the
// constant order-statistic threshold theta(p_bar/2; n, n):
// dt = exp(-theta^2 / 2).
double calibrate_equivalent_dt(ToleranceLevel p_bar, std::size_t n);

// Bookkeeping of the progressive classification walk. Rank counters start
// at 1 and advance only on non-jump comparisons; n_active shrinks on every
// flagged observation. `flags` is the indicator history aligned to the
// ascending-ordered sample.
struct ClassificationState {
  std::size_t n_total = 0;
  std::size_t n_active = 0;
  std::size_t k_max = 1;
  std::size_t k_min = 1;
  std::size_t jumps_max = 0;
  std::size_t jumps_min = 0;
  std::vector<char> flags;

  explicit ClassificationState(std::size_t n);

  std::size_t processed_max() const { return k_max - 1 + jumps_max; }
  std::size_t processed_min() const { return k_min - 1 + jumps_min; }
  // The walk alternates max side, min side; the max side moves first.
  bool max_side_next() const { return processed_max() == processed_min(); }
};

// Threshold for the next comparison implied by the state counters:
// sqrt(sigma2) * theta(p; n' - k + 1, n') with k the rank counter of the
// side about to be processed. sigma2 = 1 gives the unscaled schedule used
// on renormalized data. Throws DegenerateScheduleError once every
// observation has been classified as a jump.
double threshold_schedule(const ClassificationState& state, ToleranceLevel p,
                          double sigma2);

}  // namespace osvol::ordstat
