#include "osvol/var.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace osvol::var {

namespace {

constexpr double kCumSlack = 1e-12;

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("quantile level must lie in (0,1)");
  }
}

}  // namespace

WeightedLossDistribution::WeightedLossDistribution(
    std::vector<double> support_, std::vector<double> weights_)
    : support(std::move(support_)), weights(std::move(weights_)) {
  if (support.size() != weights.size() || support.empty()) {
    throw std::invalid_argument(
        "WeightedLossDistribution: empty or misaligned support/weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument(
          "WeightedLossDistribution: weights must be >= 0");
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "WeightedLossDistribution: weights must sum to 1");
  }
}

JumpingVarConfig::JumpingVarConfig(std::size_t N, std::size_t T, double lambda)
    : window_N(N), forecast_T(T), confidence_lambda(lambda) {
  if (N < 1 || T < 1 || T > N) {
    throw std::invalid_argument("JumpingVarConfig: need 1 <= T <= N");
  }
  check_lambda(lambda);
}

std::vector<double> normalize_losses(const LossWindow& window) {
  if (window.losses.size() != window.vols.size()) {
    throw std::invalid_argument("normalize_losses: misaligned losses/vols");
  }
  std::vector<double> out(window.losses.size());
  for (std::size_t i = 0; i < window.losses.size(); ++i) {
    if (!(window.vols[i] > 0.0)) {
      throw std::domain_error("normalize_losses: vols must be positive");
    }
    out[i] = window.losses[i] / window.vols[i];
  }
  return out;
}

double jump_probability_forecast(const std::vector<char>& flags,
                                 std::size_t T) {
  if (T < 1) {
    throw std::invalid_argument("jump_probability_forecast: T must be >= 1");
  }
  if (flags.size() < T) {
    throw std::domain_error(
        "jump_probability_forecast: fewer observations than T");
  }
  std::size_t count = 0;
  for (std::size_t i = flags.size() - T; i < flags.size(); ++i) {
    if (flags[i]) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(T);
}

OccurrenceWeights occurrence_weights(const std::vector<char>& flags,
                                     double p_forecast) {
  if (flags.empty()) {
    throw std::invalid_argument("occurrence_weights: empty flags");
  }
  if (!(p_forecast >= 0.0 && p_forecast <= 1.0)) {
    throw std::invalid_argument(
        "occurrence_weights: p_forecast must lie in [0,1]");
  }
  const std::size_t n = flags.size();
  const std::size_t n_jump =
      static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  const double dn = static_cast<double>(n);
  const double p_hist = static_cast<double>(n_jump) / dn;

  OccurrenceWeights out;
  out.weights.assign(n, 1.0 / dn);
  if ((n_jump == 0 && p_forecast > 0.0) || n_jump == n) {
    out.degenerate_fallback = true;  // reweighting undefined; keep uniform
  } else if (n_jump > 0) {
    const double alpha = p_forecast / p_hist;
    const double beta = (1.0 - p_forecast) / (1.0 - p_hist);
    for (std::size_t i = 0; i < n; ++i) {
      out.weights[i] = (flags[i] ? alpha : beta) / dn;
    }
  }
  // Close the sum to 1 exactly.
  const double total =
      std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  out.weights.back() += 1.0 - total;
  return out;
}

double weighted_quantile(const WeightedLossDistribution& dist, double lambda) {
  check_lambda(lambda);
  std::vector<std::size_t> order(dist.support.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist.support[a] < dist.support[b];
  });
  double cum = 0.0;
  for (std::size_t idx : order) {
    cum += dist.weights[idx];
    if (cum + kCumSlack >= lambda) return dist.support[idx];
  }
  return dist.support[order.back()];
}

double var_normalized(const LossWindow& window, double lambda) {
  const std::vector<double> normalized = normalize_losses(window);
  if (normalized.empty()) {
    throw std::domain_error("var_normalized: empty window");
  }
  const double dn = static_cast<double>(normalized.size());
  WeightedLossDistribution dist(normalized,
                                std::vector<double>(normalized.size(), 1.0 / dn));
  return weighted_quantile(dist, lambda) * window.vols.back();
}

double var_jumping(const LossWindow& window, const JumpingVarConfig& config,
                   bool* degenerate_fallback) {
  if (window.losses.size() < config.window_N ||
      window.flags.size() != window.losses.size() ||
      window.vols.size() != window.losses.size()) {
    throw std::domain_error(
        "var_jumping: window shorter than N or misaligned fields");
  }
  const std::size_t n = window.losses.size();
  const std::size_t start = n - config.window_N;

  LossWindow recent;
  recent.losses.assign(window.losses.begin() + start, window.losses.end());
  recent.vols.assign(window.vols.begin() + start, window.vols.end());
  recent.flags.assign(window.flags.begin() + start, window.flags.end());

  const std::vector<double> normalized = normalize_losses(recent);
  const double pf = jump_probability_forecast(recent.flags, config.forecast_T);
  OccurrenceWeights w = occurrence_weights(recent.flags, pf);
  if (degenerate_fallback != nullptr) {
    *degenerate_fallback = w.degenerate_fallback;
  }
  WeightedLossDistribution dist(normalized, std::move(w.weights));
  return weighted_quantile(dist, config.confidence_lambda) *
         recent.vols.back();
}

double var_historical(const std::vector<double>& losses, std::size_t window,
                      double lambda) {
  if (window < 1) {
    throw std::invalid_argument("var_historical: window must be >= 1");
  }
  if (losses.size() < window) {
    throw std::domain_error("var_historical: insufficient history");
  }
  std::vector<double> tail(losses.end() - static_cast<std::ptrdiff_t>(window),
                           losses.end());
  const double dn = static_cast<double>(window);
  WeightedLossDistribution dist(std::move(tail),
                                std::vector<double>(window, 1.0 / dn));
  return weighted_quantile(dist, lambda);
}

}  // namespace osvol::var
