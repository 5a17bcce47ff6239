#pragma once

#include <cstddef>
#include <vector>

namespace osvol::var {

// Rolling window of loss realizations (most recent last) with the aligned
// per-day volatility estimates and jump flags.
struct LossWindow {
  std::vector<double> losses;
  std::vector<double> vols;
  std::vector<char> flags;
};

// Discrete loss distribution: support points with occurrence probabilities.
struct WeightedLossDistribution {
  std::vector<double> support;
  std::vector<double> weights;

  WeightedLossDistribution() = default;
  WeightedLossDistribution(std::vector<double> support_,
                           std::vector<double> weights_);
};

struct JumpingVarConfig {
  std::size_t window_N = 250;
  std::size_t forecast_T = 60;
  double confidence_lambda = 0.99;  // quantile level of the loss c.d.f.

  JumpingVarConfig() = default;
  JumpingVarConfig(std::size_t N, std::size_t T, double lambda);
};

// Elementwise losses / vols. Every vol must be strictly positive.
std::vector<double> normalize_losses(const LossWindow& window);

// Fraction of flagged observations among the most recent T.
double jump_probability_forecast(const std::vector<char>& flags,
                                 std::size_t T);

struct OccurrenceWeights {
  std::vector<double> weights;
  // True when the history made the reweighting undefined (no jumps with a
  // positive forecast, or jumps everywhere) and uniform weights were used.
  bool degenerate_fallback = false;
};

// Jump-flagged losses get weight alpha/N with alpha = p_forecast / p_J, the
// rest beta/N with beta = (1 - p_forecast) / (1 - p_J); the weights close
// to 1 exactly (last weight nudged by float residue).
OccurrenceWeights occurrence_weights(const std::vector<char>& flags,
                                     double p_forecast);

// Smallest support value whose cumulative weight reaches `lambda` (lower
// quantile, no interpolation).
double weighted_quantile(const WeightedLossDistribution& dist, double lambda);

// lambda-quantile of the renormalized losses under uniform weights, scaled
// back by the last available volatility.
double var_normalized(const LossWindow& window, double lambda);

// Jumping VaR: renormalize, forecast the jump probability from the last T
// flags, reweight the window by jump occurrence, take the lambda-quantile
// and scale by the last available volatility. `degenerate_fallback`, when
// given, reports whether the uniform-weight fallback was used.
double var_jumping(const LossWindow& window, const JumpingVarConfig& config,
                   bool* degenerate_fallback = nullptr);

// Plain historical simulation: empirical lambda-quantile of the last
// `window` losses.
double var_historical(const std::vector<double>& losses, std::size_t window,
                      double lambda);

}  // namespace osvol::var
