#include "osvol/ordstat.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "osvol/errors.hpp"

namespace osvol::ordstat {

ToleranceLevel::ToleranceLevel(double p_) : p(p_) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("ToleranceLevel: p must lie in (0,1)");
  }
}

OrderIndex::OrderIndex(std::size_t k_, std::size_t n_prime_)
    : k(k_), n_prime(n_prime_) {
  if (k < 1 || n_prime < 1 || k > n_prime) {
    throw std::invalid_argument("OrderIndex: need 1 <= k <= n_prime");
  }
}

double normal_cdf(double x) {
  if (std::isnan(x)) {
    throw std::invalid_argument("normal_cdf: NaN input");
  }
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace {

constexpr int kBetaCfMaxIter = 2000;

// Lentz evaluation of the continued fraction for I_x(a,b); valid branch
// x < (a+1)/(a+b+2).
double incbeta_cf(double a, double b, double x) {
  constexpr double eps = 1e-15;
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaCfMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericError(
      "regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument(
        "regularized_incomplete_beta: parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(
        "regularized_incomplete_beta: x must lie in [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * incbeta_cf(a, b, x) / a;
  }
  return 1.0 - bt * incbeta_cf(b, a, 1.0 - x) / b;
}

double order_stat_cdf(double x, OrderIndex idx) {
  const double y = normal_cdf(x);
  const double n = static_cast<double>(idx.n_prime);
  if (idx.k == idx.n_prime) {
    return std::pow(y, n);
  }
  if (idx.k == 1) {
    // 1 - (1-y)^n, computed without cancellation.
    return -std::expm1(n * std::log1p(-y));
  }
  return regularized_incomplete_beta(static_cast<double>(idx.k),
                                     static_cast<double>(idx.n_prime - idx.k + 1),
                                     y);
}

namespace {

struct QuantileKey {
  std::uint64_t p_bits;
  std::uint64_t k;
  std::uint64_t n;
  bool operator==(const QuantileKey& o) const {
    return p_bits == o.p_bits && k == o.k && n == o.n;
  }
};

struct QuantileKeyHash {
  std::size_t operator()(const QuantileKey& key) const {
    std::uint64_t h = key.p_bits * 0x9E3779B97F4A7C15ULL;
    h ^= key.k + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= key.n + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

std::mutex g_quantile_mutex;
std::unordered_map<QuantileKey, double, QuantileKeyHash> g_quantile_cache;

// Brent root finding for f on [lo, hi] with f(lo), f(hi) of opposite sign.
template <typename F>
double brent_root(F f, double lo, double hi, double flo, double fhi) {
  constexpr int max_iter = 200;
  constexpr double xtol = 1e-14;
  double a = lo, b = hi, fa = flo, fb = fhi;
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() *
                           std::fabs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol || fb == 0.0) return b;
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol * q),
                             std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (xm > 0.0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  throw NumericError("order_stat_quantile: root finding did not converge");
}

double solve_quantile(ToleranceLevel p, OrderIndex idx) {
  const double target = 1.0 - p.p;
  auto f = [&](double x) { return order_stat_cdf(x, idx) - target; };
  double lo = -10.0, hi = 10.0;
  double flo = f(lo), fhi = f(hi);
  while (flo > 0.0 && lo > -45.0) {
    lo *= 2.0;
    flo = f(lo);
  }
  while (fhi < 0.0 && hi < 45.0) {
    hi *= 2.0;
    fhi = f(hi);
  }
  if (flo > 0.0 || fhi < 0.0) {
    throw NumericError("order_stat_quantile: could not bracket the root");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  return brent_root(f, lo, hi, flo, fhi);
}

}  // namespace

double order_stat_quantile(ToleranceLevel p, OrderIndex idx) {
  QuantileKey key{};
  std::memcpy(&key.p_bits, &p.p, sizeof(double));
  key.k = idx.k;
  key.n = idx.n_prime;
  {
    std::lock_guard<std::mutex> lock(g_quantile_mutex);
    auto it = g_quantile_cache.find(key);
    if (it != g_quantile_cache.end()) return it->second;
  }
  const double theta = solve_quantile(p, idx);
  {
    std::lock_guard<std::mutex> lock(g_quantile_mutex);
    g_quantile_cache.emplace(key, theta);
  }
  return theta;
}

double levy_modulus_threshold(double dt) {
  if (!(dt > 0.0 && dt < 1.0)) {
    throw std::domain_error("levy_modulus_threshold: dt must lie in (0,1)");
  }
  return -2.0 * std::log(dt);
}

double calibrate_equivalent_dt(ToleranceLevel p_bar, std::size_t n) {
  if (n < 1) {
    throw std::invalid_argument("calibrate_equivalent_dt: n must be >= 1");
  }
  const double theta =
      order_stat_quantile(ToleranceLevel(p_bar.p / 2.0), OrderIndex(n, n));
  if (!(theta > 0.0)) {
    throw std::domain_error(
        "calibrate_equivalent_dt: theta(p_bar/2; n, n) is not positive; the "
        "tolerance is too large for this sample size");
  }
  return std::exp(-0.5 * theta * theta);
}

ClassificationState::ClassificationState(std::size_t n)
    : n_total(n), n_active(n), flags(n, 0) {
  if (n < 1) {
    throw std::invalid_argument("ClassificationState: empty sample");
  }
}

double threshold_schedule(const ClassificationState& state, ToleranceLevel p,
                          double sigma2) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("threshold_schedule: sigma2 must be >= 0");
  }
  if (state.processed_max() + state.processed_min() > state.n_total ||
      state.n_active + state.jumps_max + state.jumps_min != state.n_total) {
    throw std::invalid_argument("threshold_schedule: inconsistent state");
  }
  const std::size_t k = state.max_side_next() ? state.k_max : state.k_min;
  if (state.n_active == 0 || k > state.n_active) {
    throw DegenerateScheduleError(
        "threshold_schedule: every remaining observation was classified as a "
        "jump; no threshold can be formed");
  }
  const std::size_t rank = state.n_active - k + 1;
  return std::sqrt(sigma2) *
         order_stat_quantile(p, OrderIndex(rank, state.n_active));
}

}  // namespace osvol::ordstat
