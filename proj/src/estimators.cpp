#include "osvol/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "osvol/errors.hpp"

namespace osvol {

namespace {

constexpr double kSigmaFloor = 1e-12;

void require_finite(const std::vector<double>& xs, const char* who) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(who) +
                                  ": values must be finite");
    }
  }
}

}  // namespace

IncrementSeries::IncrementSeries(std::vector<double> values_, double dt_,
                                 std::vector<double> timestamps_)
    : values(std::move(values_)), dt(dt_), timestamps(std::move(timestamps_)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("IncrementSeries: dt must be positive");
  }
  require_finite(values, "IncrementSeries");
  if (!timestamps.empty()) {
    if (timestamps.size() != values.size()) {
      throw std::invalid_argument(
          "IncrementSeries: timestamps must align with values");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (!(timestamps[i] > timestamps[i - 1])) {
        throw std::invalid_argument(
            "IncrementSeries: timestamps must be strictly increasing");
      }
    }
  }
}

KernelSpec::KernelSpec(std::size_t h) : bandwidth_h(h) {
  if (h < 1) {
    throw std::invalid_argument("KernelSpec: bandwidth must be >= 1");
  }
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) {
    throw std::domain_error("sample_variance: need at least 2 observations");
  }
  const double mean =
      std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_variance(const IncrementSeries& series) {
  return sample_variance(series.values);
}

ThresholdIvResult threshold_iv(const IncrementSeries& series,
                               double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw std::domain_error("threshold_iv: threshold must be positive");
  }
  ThresholdIvResult out;
  out.flags.assign(series.size(), 0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series.values[i];
    if (std::fabs(v) <= threshold) {
      out.iv += v * v;
    } else {
      out.flags[i] = 1;
    }
  }
  return out;
}

namespace {

// Progressive classification walk shared by the one-shot estimators and the
// kernel iteration. Alternates the largest and smallest unprocessed
// observations; a flagged observation shrinks the active sample, a kept one
// advances the side's rank counter. With `fixed_threshold` set, every
// comparison uses that constant instead of the schedule. Entries already
// true in `sticky` are flagged without a comparison.
std::vector<char> classify(const std::vector<double>& xs,
                           ordstat::ToleranceLevel p, double sigma2_scale,
                           const double* fixed_threshold,
                           const std::vector<char>* sticky) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  ordstat::ClassificationState st(n);
  std::vector<char> flags(n, 0);
  const std::size_t m = (n + 1) / 2;   // max-side steps
  const std::size_t mp = n / 2;        // min-side steps

  auto step = [&](std::size_t sorted_pos, bool max_side) {
    const std::size_t oi = order[sorted_pos];
    bool jump;
    if (sticky != nullptr && (*sticky)[oi]) {
      jump = true;
    } else {
      const double thr = fixed_threshold != nullptr
                             ? *fixed_threshold
                             : ordstat::threshold_schedule(st, p, sigma2_scale);
      jump = max_side ? (xs[oi] > thr) : (-xs[oi] > thr);
    }
    if (jump) {
      st.flags[sorted_pos] = 1;
      flags[oi] = 1;
      if (max_side) {
        ++st.jumps_max;
      } else {
        ++st.jumps_min;
      }
      --st.n_active;
    } else {
      if (max_side) {
        ++st.k_max;
      } else {
        ++st.k_min;
      }
    }
  };

  for (std::size_t t = 1; t <= m; ++t) {
    step(n - t, true);
    if (t <= mp) {
      step(t - 1, false);
    }
  }
  if (st.n_active == 0) {
    throw DegenerateScheduleError(
        "classification flagged every observation as a jump");
  }
  return flags;
}

double iv_over_unflagged(const std::vector<double>& xs,
                         const std::vector<char>& flags) {
  double iv = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!flags[i]) iv += xs[i] * xs[i];
  }
  return iv;
}

void require_min_length(const IncrementSeries& series, const char* who) {
  if (series.size() < 4) {
    throw std::domain_error(std::string(who) +
                            ": need at least 4 observations");
  }
}

}  // namespace

OsIvResult os_iv(const IncrementSeries& series, ordstat::ToleranceLevel p) {
  require_min_length(series, "os_iv");
  const double s2 = sample_variance(series.values);
  OsIvResult out;
  out.flags = classify(series.values, p, s2, nullptr, nullptr);
  out.iv = iv_over_unflagged(series.values, out.flags);
  return out;
}

OsIvResult os_iv_frozen(const IncrementSeries& series,
                        ordstat::ToleranceLevel p_bar) {
  require_min_length(series, "os_iv_frozen");
  const std::size_t n = series.size();
  const double s2 = sample_variance(series.values);
  const double thr = std::sqrt(s2) * ordstat::order_stat_quantile(
                                         p_bar, ordstat::OrderIndex(n, n));
  OsIvResult out;
  out.flags = classify(series.values, p_bar, 1.0, &thr, nullptr);
  out.iv = iv_over_unflagged(series.values, out.flags);
  return out;
}

double kernel_local_variance(const std::vector<double>& ybar,
                             const std::vector<char>& flags,
                             const std::vector<double>& weights, double dt) {
  if (ybar.size() != flags.size() || ybar.size() != weights.size()) {
    throw std::invalid_argument("kernel_local_variance: misaligned inputs");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("kernel_local_variance: dt must be positive");
  }
  double num = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < ybar.size(); ++i) {
    mass += weights[i];
    if (!flags[i]) num += weights[i] * ybar[i] * ybar[i];
  }
  if (!(mass > 0.0)) {
    throw std::domain_error("kernel_local_variance: zero kernel mass");
  }
  return num / (mass * dt);
}

namespace {

// One kernel re-estimation sweep. The one-sided uniform window at grid
// time t covers the h+1 strictly preceding observations (shrunk to the
// available past; t = 0 sees itself). The denominator keeps the full
// window mass, matching the estimator's normalization, so each sigma is
// the windowed root mean square of the raw non-jump increments.
std::vector<double> kernel_sweep(const std::vector<double>& values,
                                 const std::vector<char>& flags,
                                 std::size_t h) {
  const std::size_t n = values.size();
  std::vector<double> s_new(n);
  std::vector<double> pref(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    pref[i + 1] = pref[i] + (flags[i] ? 0.0 : values[i] * values[i]);
  }
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t lo, hi;  // inclusive window [lo, hi]
    if (t == 0) {
      lo = 0;
      hi = 0;
    } else {
      hi = t - 1;
      lo = (t >= h + 1) ? t - h - 1 : 0;
    }
    const double num = pref[hi + 1] - pref[lo];
    const double cnt = static_cast<double>(hi - lo + 1);
    s_new[t] = std::max(std::sqrt(num / cnt), kSigmaFloor);
  }
  return s_new;
}

}  // namespace

VolatilityPath kernel_os_volatility(const IncrementSeries& series,
                                    ordstat::ToleranceLevel p,
                                    KernelSpec kernel, std::size_t max_iter) {
  require_min_length(series, "kernel_os_volatility");
  if (max_iter < 1) {
    throw std::invalid_argument("kernel_os_volatility: max_iter must be >= 1");
  }
  const std::size_t n = series.size();
  const double s0 =
      std::max(std::sqrt(sample_variance(series.values)), kSigmaFloor);

  VolatilityPath path;
  path.sigmas.assign(n, s0);
  path.jump_flags.assign(n, 0);
  path.converged = false;

  std::vector<double> ybar(n);
  std::vector<double> kept;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      ybar[i] = series.values[i] / std::max(path.sigmas[i], kSigmaFloor);
    }
    // Residual scale of the renormalized continuous part. Exactly 1 when
    // the sigmas are right; absorbs the downward bias the exclusion of
    // flagged extremes puts into the kernel estimate, which would
    // otherwise feed back into ever more type-I flags.
    kept.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (!path.jump_flags[i]) kept.push_back(ybar[i]);
    }
    if (kept.size() < 2) {
      throw DegenerateScheduleError(
          "kernel_os_volatility: fewer than two unflagged observations");
    }
    const double scale2 = sample_variance(kept);
    std::vector<char> flags = classify(ybar, p, scale2, nullptr,
                                       &path.jump_flags);
    const bool stable = (flags == path.jump_flags);
    path.sigmas = kernel_sweep(series.values, flags, kernel.bandwidth_h);
    path.jump_flags = std::move(flags);
    path.iterations = iter;
    if (stable) {
      path.converged = true;
      break;
    }
  }
  return path;
}

VolatilityPath kernel_threshold_volatility(const IncrementSeries& series,
                                           ordstat::ToleranceLevel p_bar,
                                           KernelSpec kernel,
                                           std::size_t max_iter) {
  require_min_length(series, "kernel_threshold_volatility");
  if (max_iter < 1) {
    throw std::invalid_argument(
        "kernel_threshold_volatility: max_iter must be >= 1");
  }
  // The baseline keeps Eq.-3 semantics: one comparison level from the raw
  // sample variance and the calibrated dt, never renormalized. The jump
  // set is therefore fixed after the first pass.
  const double dt_eq = ordstat::calibrate_equivalent_dt(p_bar, series.size());
  const double thr = std::sqrt(sample_variance(series.values) *
                               ordstat::levy_modulus_threshold(dt_eq));
  VolatilityPath path;
  path.jump_flags.assign(series.size(), 0);
  bool any_kept = false;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::fabs(series.values[i]) > thr) {
      path.jump_flags[i] = 1;
    } else {
      any_kept = true;
    }
  }
  if (!any_kept) {
    throw DegenerateScheduleError(
        "kernel_threshold_volatility: every observation exceeds the "
        "threshold");
  }
  path.sigmas = kernel_sweep(series.values, path.jump_flags, kernel.bandwidth_h);
  path.iterations = 1;
  path.converged = true;
  return path;
}

VolatilityPath type1_control(const IncrementSeries& series,
                             const VolatilityPath& path) {
  if (series.size() != path.sigmas.size() ||
      series.size() != path.jump_flags.size()) {
    throw std::invalid_argument("type1_control: misaligned inputs");
  }
  VolatilityPath out = path;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (out.jump_flags[i] &&
        std::fabs(series.values[i]) < out.sigmas[i]) {
      out.jump_flags[i] = 0;
    }
  }
  return out;
}

}  // namespace osvol
