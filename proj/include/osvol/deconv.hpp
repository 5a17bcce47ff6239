#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace osvol::deconv {

// Characteristic-function values on a nonnegative frequency grid.
struct CharacteristicGrid {
  std::vector<double> u;
  std::vector<std::complex<double>> values;
};

// Recovered density on a real grid. f_raw keeps the signed quadrature
// output for diagnostics; f_clipped is max(f_raw, 0).
struct DensityEstimate {
  std::vector<double> z;
  std::vector<double> f_raw;
  std::vector<double> f_clipped;
};

struct Histogram {
  std::vector<double> edges;   // size bins + 1, strictly increasing
  std::vector<double> counts;  // size bins
  std::vector<double> centers() const;
};

// Empirical characteristic function: mean over the sample of exp(i u x).
CharacteristicGrid ecf(const std::vector<double>& sample,
                       const std::vector<double>& u_grid);

// Weighted variant; weights must be nonnegative with positive total mass.
CharacteristicGrid ecf_weighted(const std::vector<double>& points,
                                const std::vector<double>& weights,
                                const std::vector<double>& u_grid);

// Pointwise division by the Gaussian characteristic function
// exp(i u mu - sigma2 u^2 / 2). Frequencies where the divisor's modulus
// falls below eps_cut are dropped.
CharacteristicGrid deconvolve_gaussian(const CharacteristicGrid& cf, double mu,
                                       double sigma2, double eps_cut = 1e-8);

// f(z) = (1/pi) Re  integral_0^Umax  psi(u) exp(-i u z) du, trapezoid rule
// over the grid the characteristic function is defined on.
DensityEstimate invert_cf_to_pdf(const CharacteristicGrid& cf,
                                 const std::vector<double>& z_grid);

Histogram make_histogram(const std::vector<double>& sample, std::size_t bins,
                         double lo, double hi);

// Fills a contiguous empty central region (detectors never flag near-zero
// realizations) with a least-squares cubic through the n_fit_points
// innermost populated bins on each side. Populated bins are never touched;
// a histogram without a central gap comes back unchanged.
Histogram fill_histogram_center(const Histogram& hist,
                                std::size_t n_fit_points = 4);

struct PipelineOptions {
  std::size_t bins = 101;
  std::size_t n_fit_points = 4;
  std::size_t u_points = 2048;
  std::size_t z_points = 1024;
  double eps_cut = 1e-8;
};

// Full jump-size recovery: histogram the convoluted sample, fill the
// central gap, form the weighted ECF of the augmented sample, divide out
// the Gaussian noise CF and invert. The frequency grid stops where the
// empirical CF drops below its sampling noise floor, since dividing pure
// noise by a vanishing Gaussian CF swamps the estimate.
DensityEstimate jump_size_density(const std::vector<double>& sample, double mu,
                                  double sigma2,
                                  const PipelineOptions& opts = {});

}  // namespace osvol::deconv
