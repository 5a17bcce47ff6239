#pragma once

#include <cstddef>
#include <vector>

#include "osvol/ordstat.hpp"

namespace osvol {

// Discrete increments of an observed process, recorded every dt units of
// time. Timestamps are optional; when present they must be strictly
// increasing and aligned with the values.
struct IncrementSeries {
  std::vector<double> values;
  double dt = 1.0;
  std::vector<double> timestamps;

  IncrementSeries() = default;
  IncrementSeries(std::vector<double> values_, double dt_,
                  std::vector<double> timestamps_ = {});

  std::size_t size() const { return values.size(); }
};

// Per-observation local volatility estimates with aligned jump flags.
// `converged` is false when the iteration stopped at max_iter with the
// jump set still changing.
struct VolatilityPath {
  std::vector<double> sigmas;
  std::vector<char> jump_flags;
  std::size_t iterations = 0;
  bool converged = true;
};

// One-sided uniform kernel, bandwidth expressed in time steps.
struct KernelSpec {
  std::size_t bandwidth_h = 100;
  explicit KernelSpec(std::size_t h);
};

// Unbiased sample variance (divisor n-1). Requires n >= 2.
double sample_variance(const std::vector<double>& xs);
double sample_variance(const IncrementSeries& series);

struct ThresholdIvResult {
  double iv = 0.0;
  std::vector<char> flags;  // true where the increment was excluded
};

// Fixed-threshold integrated variance: sum of squared increments with
// |increment| <= threshold. The threshold is the already rescaled
// comparison level sqrt(theta * sigma^2).
ThresholdIvResult threshold_iv(const IncrementSeries& series,
                               double threshold);

struct OsIvResult {
  double iv = 0.0;
  std::vector<char> flags;  // original time order
};

// Order-statistic IV estimator: progressive classification of the ordered
// increments against the rank-updated threshold schedule, rescaled by the
// sample variance of the raw series. Flags come back in original order.
OsIvResult os_iv(const IncrementSeries& series, ordstat::ToleranceLevel p);

// Same walk with the schedule frozen at theta(p_bar; n, n) for every
// comparison; equivalent to a fixed two-sided threshold.
OsIvResult os_iv_frozen(const IncrementSeries& series,
                        ordstat::ToleranceLevel p_bar);

// Eq.-form kernel variance at one grid time: sum of w_i * ybar_i^2 over
// non-flagged observations divided by (sum of all w_i) * dt.
double kernel_local_variance(const std::vector<double>& ybar,
                             const std::vector<char>& flags,
                             const std::vector<double>& weights, double dt);

// Iterative time-varying volatility estimation: renormalize by the current
// sigmas, classify with the unscaled order-statistic schedule (jumps found
// in earlier iterations stay flagged), then refresh each sigma from the
// kernel-weighted mean square of the renormalized non-jump increments over
// the trailing window. Stops when the jump set is unchanged.
VolatilityPath kernel_os_volatility(const IncrementSeries& series,
                                    ordstat::ToleranceLevel p,
                                    KernelSpec kernel,
                                    std::size_t max_iter = 50);

// Threshold-estimator variant of the same iteration: classification uses
// the constant level theta(p_bar/2; n, n) obtained through the calibrated
// dt correspondence instead of the rank-updated schedule.
VolatilityPath kernel_threshold_volatility(const IncrementSeries& series,
                                           ordstat::ToleranceLevel p_bar,
                                           KernelSpec kernel,
                                           std::size_t max_iter = 50);

// Reclassifies flagged increments with |value| < sigma as ordinary
// observations. Sigmas are left untouched.
VolatilityPath type1_control(const IncrementSeries& series,
                             const VolatilityPath& path);

}  // namespace osvol
