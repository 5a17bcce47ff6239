#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "osvol/estimators.hpp"
#include "osvol/simulate.hpp"

namespace osvol::io {

// Daily close prices with the quotation tick size. `row_ticks`, when
// non-empty, overrides `tick` per row (mixed-regime series).
struct PriceSeries {
  std::vector<std::string> dates;
  std::vector<double> prices;
  double tick = 0.0;
  std::vector<double> row_ticks;
};

// Key/value lines echoed into every artifact header as `# key = value`.
using MetaMap = std::map<std::string, std::string>;

// CSV with header `date,price[,tick]`, ISO-8601 dates, strictly increasing.
PriceSeries load_price_csv(const std::string& path);

// ln(P_{t+1}/P_t), dt = 1; optionally demeaned.
IncrementSeries to_log_returns(const PriceSeries& series, bool demean);

// Adds an independent uniform perturbation in [0, tick) to every price,
// removing the atom of exactly-zero returns created by tick rounding.
// tick = 0 leaves the series untouched.
PriceSeries price_adjust(const PriceSeries& series, std::uint64_t seed);

// ---- artifact files -------------------------------------------------------

void write_simulated_path_csv(const std::string& path,
                              const sim::SimulatedPath& sim_path,
                              const MetaMap& meta);

void write_volatility_csv(const std::string& path,
                          const IncrementSeries& series,
                          const VolatilityPath& vol, const MetaMap& meta);

struct VolatilityFile {
  IncrementSeries series;
  VolatilityPath path;
  MetaMap meta;
};

// Reads either a detect/estimate artifact (index,increment,sigma,jump_flag)
// or any CSV carrying an `increment` column; sigma/jump_flag columns are
// optional. dt is recovered from the `# dt = ...` header when present.
VolatilityFile read_volatility_csv(const std::string& path);

void write_density_csv(const std::string& path, const std::vector<double>& z,
                       const std::vector<double>& f_raw,
                       const std::vector<double>& f_clipped,
                       const MetaMap& meta);

// External per-day volatility file: CSV with a `sigma` (or `vol`) column.
std::vector<double> read_external_vols_csv(const std::string& path);

struct TableWriter {
  explicit TableWriter(const std::string& path);
  ~TableWriter();
  TableWriter(const TableWriter&) = delete;
  TableWriter& operator=(const TableWriter&) = delete;

  void meta(const MetaMap& meta);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  void* stream_;
};

std::string format_double(double v);

}  // namespace osvol::io
