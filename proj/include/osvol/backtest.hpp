#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "osvol/var.hpp"

namespace osvol::backtest {

// Percentile ranks of realized observations under the forecast
// distributions, one per backtest date; uniform on [0,1] under a
// well-calibrated model.
struct RankSeries {
  std::vector<double> ranks;
};

struct AdResult {
  double statistic = 0.0;
  bool reject = false;
  double level = 0.0;
  bool clamped = false;  // some Phi value hit the underflow clamp
};

// Cumulative weight of support values <= realized (right-continuous CDF).
double percentile_rank(const var::WeightedLossDistribution& dist,
                       double realized);

struct UniformityResult {
  std::vector<double> grid;
  std::vector<double> deviations;  // |F_hat(g) - g| per grid point
  double mean_abs = 0.0;
};

// Empirical c.d.f. of the ranks against the uniform c.d.f. on the grid
// {1/G, ..., 1}.
UniformityResult uniformity_deviation(const RankSeries& ranks,
                                      std::size_t grid_points = 100);

// A^2 statistic against the fully specified standard normal. Phi values
// are clamped at 1e-300 before the logs; `clamped`, when given, reports
// whether the clamp fired.
double ad_statistic(const std::vector<double>& sample,
                    bool* clamped = nullptr);

// Supported levels: 0.15, 0.10, 0.05, 0.025, 0.01. Critical values are
// Monte Carlo calibrated (tools/ad_calibrate regenerates the table).
AdResult ad_test(const std::vector<double>& sample, double level);

// Dates where the realized loss exceeds the forecast VaR.
std::size_t exception_count(const std::vector<double>& var_series,
                            const std::vector<double>& realized_losses);

enum class VarModel { fvar_jj, fvar, hvar };

struct BacktestConfig {
  VarModel model = VarModel::fvar_jj;
  var::JumpingVarConfig jv{};       // N, T and the quantile level
  double lambda_tail = 0.01;        // exceedance probability of the VaR
  std::size_t hvar_window = 1000;   // plain historical window
  std::size_t start = 0;            // first forecast date (auto if 0)
  std::size_t grid_points = 100;
};

struct BacktestRow {
  std::size_t index = 0;
  double realized = 0.0;
  double var = 0.0;
  double rank = 0.0;
  bool exception = false;
};

struct BacktestReport {
  std::vector<BacktestRow> rows;
  UniformityResult uniformity;
  std::size_t exceptions = 0;
  AdResult ad;  // AD test of the ranks mapped through the normal quantile
};

// Rolls the chosen model over the loss history: at each date the forecast
// distribution is built from strictly prior data, the realized loss is
// ranked under it and compared against the VaR at the configured tail.
// vols/flags are only consulted by the filtered models.
BacktestReport rolling_backtest(const std::vector<double>& losses,
                                const std::vector<double>& vols,
                                const std::vector<char>& flags,
                                const BacktestConfig& config);

std::string var_model_name(VarModel model);

}  // namespace osvol::backtest
