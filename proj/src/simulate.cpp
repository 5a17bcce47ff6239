#include "osvol/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace osvol::sim {

namespace {

void validate_common(std::size_t n_steps, double horizon_T) {
  if (n_steps < 1) {
    throw std::invalid_argument("simulate: n_steps must be >= 1");
  }
  if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) {
    throw std::invalid_argument("simulate: horizon must be positive");
  }
}

}  // namespace

SimulatedPath simulate_merton(const MertonParams& params, std::size_t n_steps,
                              double horizon_T, std::uint64_t seed) {
  validate_common(n_steps, horizon_T);
  if (params.sigma < 0.0 || params.lambda < 0.0 || params.delta < 0.0) {
    throw std::invalid_argument(
        "simulate_merton: sigma, lambda and delta must be >= 0");
  }
  const double dt = horizon_T / static_cast<double>(n_steps);
  const double sdt = std::sqrt(dt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z01(0.0, 1.0);
  std::poisson_distribution<int> pois(params.lambda > 0.0 ? params.lambda * dt
                                                          : 1.0);

  SimulatedPath out;
  std::vector<double> values(n_steps);
  out.true_jump_sizes.assign(n_steps, 0.0);
  out.true_flags.assign(n_steps, 0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    double inc = params.b * dt + params.sigma * sdt * z01(rng);
    double jump = 0.0;
    if (params.lambda > 0.0) {
      const int count = pois(rng);
      for (int j = 0; j < count; ++j) {
        jump += params.mu + params.delta * z01(rng);
      }
    }
    values[i] = inc + jump;
    out.true_jump_sizes[i] = jump;
    out.true_flags[i] = (jump != 0.0);
  }
  out.increments = IncrementSeries(std::move(values), dt);
  return out;
}

SimulatedPath simulate_vgbm(const VgBmParams& params, std::size_t n_steps,
                            double horizon_T, std::uint64_t seed) {
  validate_common(n_steps, horizon_T);
  if (params.sigma < 0.0 || params.beta < 0.0 || !(params.k_var > 0.0)) {
    throw std::invalid_argument(
        "simulate_vgbm: need sigma >= 0, beta >= 0 and k_var > 0");
  }
  const double dt = horizon_T / static_cast<double>(n_steps);
  const double sdt = std::sqrt(dt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z01(0.0, 1.0);
  // Subordinator increment over dt: Gamma(shape dt/k, scale k), so the mean
  // is dt and the variance k*dt.
  std::gamma_distribution<double> gam(dt / params.k_var, params.k_var);

  SimulatedPath out;
  std::vector<double> values(n_steps);
  out.true_jump_sizes.assign(n_steps, 0.0);
  out.true_flags.assign(n_steps, 0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double dv = gam(rng);
    const double vg = params.alpha * dv + params.beta * std::sqrt(dv) * z01(rng);
    const double diff = params.b * dt + params.sigma * sdt * z01(rng);
    values[i] = diff + vg;
    out.true_jump_sizes[i] = vg;
    out.true_flags[i] = (vg != 0.0);
  }
  out.increments = IncrementSeries(std::move(values), dt);
  return out;
}

std::uint64_t path_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace osvol::sim
