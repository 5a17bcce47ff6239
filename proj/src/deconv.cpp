#include "osvol/deconv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "osvol/errors.hpp"

namespace osvol::deconv {

namespace {

double sample_sd(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / std::max(n - 1.0, 1.0));
}

void check_u_grid(const std::vector<double>& u_grid) {
  if (u_grid.empty()) {
    throw std::invalid_argument("ecf: empty frequency grid");
  }
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    if (!std::isfinite(u_grid[j]) || u_grid[j] < 0.0) {
      throw std::invalid_argument("ecf: frequencies must be >= 0");
    }
    if (j > 0 && !(u_grid[j] > u_grid[j - 1])) {
      throw std::invalid_argument("ecf: frequencies must be increasing");
    }
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + step * static_cast<double>(i);
  }
  out.back() = hi;
  return out;
}

}  // namespace

std::vector<double> Histogram::centers() const {
  std::vector<double> c(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    c[i] = 0.5 * (edges[i] + edges[i + 1]);
  }
  return c;
}

CharacteristicGrid ecf(const std::vector<double>& sample,
                       const std::vector<double>& u_grid) {
  if (sample.empty()) {
    throw std::domain_error("ecf: empty sample");
  }
  check_u_grid(u_grid);
  CharacteristicGrid out;
  out.u = u_grid;
  out.values.resize(u_grid.size());
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    double re = 0.0, im = 0.0;
    const double u = u_grid[j];
    for (double x : sample) {
      re += std::cos(u * x);
      im += std::sin(u * x);
    }
    out.values[j] = {re * inv_n, im * inv_n};
  }
  return out;
}

CharacteristicGrid ecf_weighted(const std::vector<double>& points,
                                const std::vector<double>& weights,
                                const std::vector<double>& u_grid) {
  if (points.empty() || points.size() != weights.size()) {
    throw std::domain_error("ecf_weighted: empty or misaligned inputs");
  }
  check_u_grid(u_grid);
  double mass = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("ecf_weighted: weights must be >= 0");
    }
    mass += w;
  }
  if (!(mass > 0.0)) {
    throw std::domain_error("ecf_weighted: zero total weight");
  }
  CharacteristicGrid out;
  out.u = u_grid;
  out.values.resize(u_grid.size());
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    double re = 0.0, im = 0.0;
    const double u = u_grid[j];
    for (std::size_t i = 0; i < points.size(); ++i) {
      re += weights[i] * std::cos(u * points[i]);
      im += weights[i] * std::sin(u * points[i]);
    }
    out.values[j] = {re / mass, im / mass};
  }
  return out;
}

CharacteristicGrid deconvolve_gaussian(const CharacteristicGrid& cf, double mu,
                                       double sigma2, double eps_cut) {
  if (!std::isfinite(sigma2) || sigma2 < 0.0) {
    throw std::domain_error("deconvolve_gaussian: sigma2 must be finite, >= 0");
  }
  if (!std::isfinite(mu)) {
    throw std::domain_error("deconvolve_gaussian: mu must be finite");
  }
  CharacteristicGrid out;
  for (std::size_t j = 0; j < cf.u.size(); ++j) {
    const double u = cf.u[j];
    const double modulus = std::exp(-0.5 * sigma2 * u * u);
    if (modulus < eps_cut) continue;
    const std::complex<double> gauss =
        std::polar(modulus, mu * u);  // exp(i u mu - sigma2 u^2 / 2)
    out.u.push_back(u);
    out.values.push_back(cf.values[j] / gauss);
  }
  return out;
}

DensityEstimate invert_cf_to_pdf(const CharacteristicGrid& cf,
                                 const std::vector<double>& z_grid) {
  if (cf.u.size() < 2) {
    throw NumericError(
        "invert_cf_to_pdf: retained frequency grid is too small; "
        "deconvolution impossible");
  }
  if (z_grid.empty()) {
    throw std::invalid_argument("invert_cf_to_pdf: empty z grid");
  }
  for (std::size_t i = 1; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > z_grid[i - 1])) {
      throw std::invalid_argument(
          "invert_cf_to_pdf: z grid must be strictly increasing");
    }
  }
  const std::size_t nu = cf.u.size();
  std::vector<double> w(nu, 0.0);  // trapezoid weights
  for (std::size_t j = 0; j + 1 < nu; ++j) {
    const double du = cf.u[j + 1] - cf.u[j];
    w[j] += 0.5 * du;
    w[j + 1] += 0.5 * du;
  }
  DensityEstimate out;
  out.z = z_grid;
  out.f_raw.resize(z_grid.size());
  out.f_clipped.resize(z_grid.size());
  constexpr double inv_pi = 0.31830988618379067154;
  for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
    const double z = z_grid[zi];
    double acc = 0.0;
    for (std::size_t j = 0; j < nu; ++j) {
      const double phase = cf.u[j] * z;
      // Re(psi * exp(-i u z))
      acc += w[j] * (cf.values[j].real() * std::cos(phase) +
                     cf.values[j].imag() * std::sin(phase));
    }
    out.f_raw[zi] = inv_pi * acc;
    out.f_clipped[zi] = std::max(out.f_raw[zi], 0.0);
  }
  return out;
}

Histogram make_histogram(const std::vector<double>& sample, std::size_t bins,
                         double lo, double hi) {
  if (bins < 1 || !(hi > lo)) {
    throw std::invalid_argument("make_histogram: bad bin specification");
  }
  Histogram h;
  h.edges = linspace(lo, hi, bins + 1);
  h.counts.assign(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : sample) {
    if (x < lo || x > hi) continue;
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= bins) idx = bins - 1;
    h.counts[idx] += 1.0;
  }
  return h;
}

namespace {

// Least-squares cubic through (x, y); returns the 4 coefficients, constant
// term first. Normal equations are fine at this size.
std::array<double, 4> fit_cubic(const std::vector<double>& x,
                                const std::vector<double>& y) {
  constexpr int dim = 4;
  double a[dim][dim] = {};
  double rhs[dim] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double powers[2 * dim - 1];
    powers[0] = 1.0;
    for (int p = 1; p < 2 * dim - 1; ++p) powers[p] = powers[p - 1] * x[i];
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) a[r][c] += powers[r + c];
      rhs[r] += powers[r] * y[i];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (std::fabs(a[piv][col]) < 1e-30) {
      throw NumericError("fill_histogram_center: singular cubic fit");
    }
    if (piv != col) {
      for (int c = 0; c < dim; ++c) std::swap(a[piv][c], a[col][c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (int r = col + 1; r < dim; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < dim; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<double, 4> coef{};
  for (int r = dim - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < dim; ++c) s -= a[r][c] * coef[c];
    coef[r] = s / a[r][r];
  }
  return coef;
}

double eval_cubic(const std::array<double, 4>& c, double x) {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

}  // namespace

Histogram fill_histogram_center(const Histogram& hist,
                                std::size_t n_fit_points) {
  if (hist.counts.empty() || hist.edges.size() != hist.counts.size() + 1) {
    throw std::invalid_argument("fill_histogram_center: malformed histogram");
  }
  if (n_fit_points < 1) {
    throw std::invalid_argument("fill_histogram_center: n_fit_points >= 1");
  }
  const std::size_t bins = hist.counts.size();
  const std::vector<double> centers = hist.centers();

  // Anchor at the bin containing zero when the range covers it, else at the
  // middle of the range.
  std::size_t anchor = bins / 2;
  if (hist.edges.front() < 0.0 && hist.edges.back() > 0.0) {
    for (std::size_t i = 0; i < bins; ++i) {
      if (hist.edges[i] <= 0.0 && 0.0 < hist.edges[i + 1]) {
        anchor = i;
        break;
      }
    }
  }
  if (hist.counts[anchor] > 0.0) {
    return hist;  // no central gap
  }

  // Expand the empty run around the anchor.
  std::size_t gap_lo = anchor, gap_hi = anchor;
  while (gap_lo > 0 && hist.counts[gap_lo - 1] == 0.0) --gap_lo;
  while (gap_hi + 1 < bins && hist.counts[gap_hi + 1] == 0.0) ++gap_hi;

  // Innermost populated bins on each side of the gap.
  std::vector<double> xs, ys;
  std::size_t taken = 0;
  for (std::size_t i = gap_lo; i-- > 0 && taken < n_fit_points;) {
    if (hist.counts[i] > 0.0) {
      xs.push_back(centers[i]);
      ys.push_back(hist.counts[i]);
      ++taken;
    }
  }
  taken = 0;
  for (std::size_t i = gap_hi + 1; i < bins && taken < n_fit_points; ++i) {
    if (hist.counts[i] > 0.0) {
      xs.push_back(centers[i]);
      ys.push_back(hist.counts[i]);
      ++taken;
    }
  }
  if (xs.size() < 4) {
    throw std::domain_error(
        "fill_histogram_center: fewer populated bins than a cubic fit needs");
  }
  const auto coef = fit_cubic(xs, ys);
  Histogram out = hist;
  for (std::size_t i = gap_lo; i <= gap_hi; ++i) {
    out.counts[i] = std::max(eval_cubic(coef, centers[i]), 0.0);
  }
  return out;
}

DensityEstimate jump_size_density(const std::vector<double>& sample, double mu,
                                  double sigma2, const PipelineOptions& opts) {
  if (sample.size() < 8) {
    throw std::domain_error("jump_size_density: sample too small");
  }
  const auto [mn_it, mx_it] = std::minmax_element(sample.begin(), sample.end());
  const double a = std::max(std::fabs(*mn_it), std::fabs(*mx_it));
  if (!(a > 0.0)) {
    throw std::domain_error("jump_size_density: degenerate sample");
  }

  Histogram hist = make_histogram(sample, opts.bins, -a, a);
  Histogram filled = fill_histogram_center(hist, opts.n_fit_points);

  // Augment the raw sample with the interpolated central mass.
  std::vector<double> points = sample;
  std::vector<double> weights(sample.size(), 1.0);
  const std::vector<double> centers = filled.centers();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double extra = filled.counts[i] - hist.counts[i];
    if (extra > 0.0) {
      points.push_back(centers[i]);
      weights.push_back(extra);
    }
  }
  double mass = 0.0;
  for (double w : weights) mass += w;

  // Frequency cap from the Gaussian-divisor cutoff...
  double u_cap = sigma2 > 0.0
                     ? std::sqrt(2.0 * std::log(1.0 / opts.eps_cut) / sigma2)
                     : std::numeric_limits<double>::infinity();
  const double spread = std::max(sample_sd(sample), 1e-12);
  u_cap = std::min(u_cap, 64.0 / spread);
  // ...then tightened to where the empirical CF meets its noise floor.
  const double floor_level = 2.0 / std::sqrt(mass);
  const std::size_t scan_points = 512;
  const auto scan = ecf_weighted(points, weights,
                                 linspace(0.0, u_cap, scan_points));
  double u_trunc = u_cap;
  for (std::size_t j = 1; j < scan.u.size(); ++j) {
    if (std::abs(scan.values[j]) < floor_level) {
      u_trunc = scan.u[j];
      break;
    }
  }
  if (!(u_trunc > 0.0)) {
    throw NumericError("jump_size_density: no usable frequency range");
  }

  const auto cf_y =
      ecf_weighted(points, weights, linspace(0.0, u_trunc, opts.u_points));
  const auto cf_jump = deconvolve_gaussian(cf_y, mu, sigma2, opts.eps_cut);

  const double pad = 4.0 * spread;
  const auto z_grid = linspace(*mn_it - pad, *mx_it + pad, opts.z_points);
  return invert_cf_to_pdf(cf_jump, z_grid);
}

}  // namespace osvol::deconv
