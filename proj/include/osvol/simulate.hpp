#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "osvol/estimators.hpp"

namespace osvol::sim {

// dX = b dt + sigma dW + (jump size) dN, jump count Poisson(lambda dt),
// jump sizes N(mu, delta^2).
struct MertonParams {
  double b = 0.0;
  double sigma = 0.5;
  double lambda = 10.0;
  double mu = 0.0;
  double delta = 1.5;
};

// dX = b dt + sigma dZ + alpha dV + beta dW_V with V a gamma subordinator
// of unit mean rate and variance k_var per unit time.
struct VgBmParams {
  double b = 0.0;
  double sigma = 0.5;
  double alpha = 0.0;
  double beta = 1.5;
  double k_var = 0.004;
};

// Increments plus the ground-truth jump bookkeeping used by the
// verification experiments. true_flags[i] holds exactly when
// true_jump_sizes[i] != 0.
struct SimulatedPath {
  IncrementSeries increments;
  std::vector<double> true_jump_sizes;
  std::vector<char> true_flags;
};

SimulatedPath simulate_merton(const MertonParams& params, std::size_t n_steps,
                              double horizon_T, std::uint64_t seed);

SimulatedPath simulate_vgbm(const VgBmParams& params, std::size_t n_steps,
                            double horizon_T, std::uint64_t seed);

// Seed for path `index` within a batch started from `base`: splitmix64 of
// base xor a Weyl increment, so parallel paths are decorrelated while the
// whole batch stays reproducible.
std::uint64_t path_seed(std::uint64_t base, std::uint64_t index);

}  // namespace osvol::sim
