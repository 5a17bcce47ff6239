#include "osvol/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace osvol::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    out.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": cannot parse number '" + s + "'");
  }
  if (consumed != s.size()) {
    throw std::invalid_argument(where + ": trailing characters in '" + s + "'");
  }
  return v;
}

bool looks_like_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

struct RawCsv {
  MetaMap meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

RawCsv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + path + "'");
  }
  RawCsv out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        out.meta[trim(t.substr(1, eq - 1))] = trim(t.substr(eq + 1));
      }
      continue;
    }
    if (!header_seen) {
      out.columns = split_csv(t);
      header_seen = true;
      continue;
    }
    out.rows.push_back(split_csv(t));
    out.line_numbers.push_back(line_no);
  }
  if (!header_seen) {
    throw std::invalid_argument(path + ": no header row");
  }
  return out;
}

std::ptrdiff_t find_column(const RawCsv& csv, const std::string& name) {
  for (std::size_t j = 0; j < csv.columns.size(); ++j) {
    if (csv.columns[j] == name) return static_cast<std::ptrdiff_t>(j);
  }
  return -1;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PriceSeries load_price_csv(const std::string& path) {
  const RawCsv csv = read_csv(path);
  const auto date_col = find_column(csv, "date");
  const auto price_col = find_column(csv, "price");
  const auto tick_col = find_column(csv, "tick");
  if (date_col < 0 || price_col < 0) {
    throw std::invalid_argument(path + ": header must contain date,price");
  }
  PriceSeries out;
  if (auto it = csv.meta.find("tick"); it != csv.meta.end()) {
    out.tick = parse_double(it->second, path + " (tick header)");
  }
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    const std::string where =
        path + " line " + std::to_string(csv.line_numbers[i]);
    if (row.size() < csv.columns.size()) {
      throw std::invalid_argument(where + ": too few fields");
    }
    const std::string& date = row[static_cast<std::size_t>(date_col)];
    if (!looks_like_iso_date(date)) {
      throw std::invalid_argument(where + ": bad ISO-8601 date '" + date + "'");
    }
    if (!out.dates.empty()) {
      if (date == out.dates.back()) {
        throw std::domain_error(where + ": duplicate date " + date);
      }
      if (date < out.dates.back()) {
        throw std::domain_error(where + ": dates must be increasing");
      }
    }
    const double price =
        parse_double(row[static_cast<std::size_t>(price_col)], where);
    if (!(price > 0.0) || !std::isfinite(price)) {
      throw std::domain_error(where + ": price must be positive");
    }
    out.dates.push_back(date);
    out.prices.push_back(price);
    if (tick_col >= 0) {
      const double tick =
          parse_double(row[static_cast<std::size_t>(tick_col)], where);
      if (tick < 0.0) {
        throw std::domain_error(where + ": tick must be >= 0");
      }
      out.row_ticks.push_back(tick);
    }
  }
  return out;
}

IncrementSeries to_log_returns(const PriceSeries& series, bool demean) {
  if (series.prices.size() < 2) {
    throw std::domain_error("to_log_returns: need at least 2 prices");
  }
  std::vector<double> values(series.prices.size() - 1);
  for (std::size_t i = 0; i + 1 < series.prices.size(); ++i) {
    values[i] = std::log(series.prices[i + 1] / series.prices[i]);
  }
  if (demean) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    for (double& v : values) v -= mean;
  }
  return IncrementSeries(std::move(values), 1.0);
}

PriceSeries price_adjust(const PriceSeries& series, std::uint64_t seed) {
  PriceSeries out = series;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < out.prices.size(); ++i) {
    const double tick =
        !series.row_ticks.empty() ? series.row_ticks[i] : series.tick;
    if (tick > 0.0) {
      out.prices[i] += tick * unit(rng);
    }
  }
  return out;
}

TableWriter::TableWriter(const std::string& path) {
  auto* f = new std::ofstream(path);
  if (!*f) {
    delete f;
    throw std::invalid_argument("cannot write '" + path + "'");
  }
  stream_ = f;
}

TableWriter::~TableWriter() {
  auto* f = static_cast<std::ofstream*>(stream_);
  delete f;
}

void TableWriter::meta(const MetaMap& meta) {
  auto& f = *static_cast<std::ofstream*>(stream_);
  for (const auto& [k, v] : meta) {
    f << "# " << k << " = " << v << "\n";
  }
}

void TableWriter::header(const std::vector<std::string>& columns) {
  row(columns);
}

void TableWriter::row(const std::vector<std::string>& cells) {
  auto& f = *static_cast<std::ofstream*>(stream_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) f << ',';
    f << cells[i];
  }
  f << "\n";
}

void write_simulated_path_csv(const std::string& path,
                              const sim::SimulatedPath& sim_path,
                              const MetaMap& meta) {
  TableWriter w(path);
  w.meta(meta);
  w.header({"index", "increment", "true_jump_size", "true_flag"});
  for (std::size_t i = 0; i < sim_path.increments.size(); ++i) {
    w.row({std::to_string(i), format_double(sim_path.increments.values[i]),
           format_double(sim_path.true_jump_sizes[i]),
           sim_path.true_flags[i] ? "1" : "0"});
  }
}

void write_volatility_csv(const std::string& path,
                          const IncrementSeries& series,
                          const VolatilityPath& vol, const MetaMap& meta) {
  TableWriter w(path);
  w.meta(meta);
  w.header({"index", "increment", "sigma", "jump_flag"});
  for (std::size_t i = 0; i < series.size(); ++i) {
    w.row({std::to_string(i), format_double(series.values[i]),
           format_double(vol.sigmas[i]), vol.jump_flags[i] ? "1" : "0"});
  }
}

VolatilityFile read_volatility_csv(const std::string& path) {
  const RawCsv csv = read_csv(path);
  const auto inc_col = find_column(csv, "increment");
  if (inc_col < 0) {
    throw std::invalid_argument(path + ": no 'increment' column");
  }
  const auto sigma_col = find_column(csv, "sigma");
  const auto flag_col = find_column(csv, "jump_flag");

  VolatilityFile out;
  out.meta = csv.meta;
  double dt = 1.0;
  if (auto it = csv.meta.find("dt"); it != csv.meta.end()) {
    dt = parse_double(it->second, path + " (dt header)");
  }
  std::vector<double> values;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    const std::string where =
        path + " line " + std::to_string(csv.line_numbers[i]);
    if (row.size() < csv.columns.size()) {
      throw std::invalid_argument(where + ": too few fields");
    }
    values.push_back(parse_double(row[static_cast<std::size_t>(inc_col)], where));
    if (sigma_col >= 0) {
      out.path.sigmas.push_back(
          parse_double(row[static_cast<std::size_t>(sigma_col)], where));
    }
    if (flag_col >= 0) {
      const std::string& cell = row[static_cast<std::size_t>(flag_col)];
      out.path.jump_flags.push_back(cell == "1" || cell == "true" ? 1 : 0);
    }
  }
  out.series = IncrementSeries(std::move(values), dt);
  return out;
}

void write_density_csv(const std::string& path, const std::vector<double>& z,
                       const std::vector<double>& f_raw,
                       const std::vector<double>& f_clipped,
                       const MetaMap& meta) {
  TableWriter w(path);
  w.meta(meta);
  w.header({"z", "f_raw", "f_clipped"});
  for (std::size_t i = 0; i < z.size(); ++i) {
    w.row({format_double(z[i]), format_double(f_raw[i]),
           format_double(f_clipped[i])});
  }
}

std::vector<double> read_external_vols_csv(const std::string& path) {
  const RawCsv csv = read_csv(path);
  auto col = find_column(csv, "sigma");
  if (col < 0) col = find_column(csv, "vol");
  if (col < 0) {
    throw std::invalid_argument(path + ": no 'sigma' or 'vol' column");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const std::string where =
        path + " line " + std::to_string(csv.line_numbers[i]);
    const double v =
        parse_double(csv.rows[i][static_cast<std::size_t>(col)], where);
    if (!(v > 0.0)) {
      throw std::domain_error(where + ": volatility must be positive");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace osvol::io
