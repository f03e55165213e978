#include "mbv/ticks.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, delim)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& s, const std::string& what, long lineno) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(lineno) +
                             ": cannot parse " + what + " '" + s + "'");
  }
  if (pos != s.size())
    throw std::runtime_error("line " + std::to_string(lineno) +
                             ": trailing junk in " + what + " '" + s + "'");
  return v;
}

}  // namespace

TickSeries load_ticks(const std::string& filename, const TickColumns& columns,
                      char delimiter, bool require_positive) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open tick file " + filename);

  std::string line;
  long lineno = 0;
  if (!std::getline(in, line))
    throw std::runtime_error(filename + ": empty file");
  ++lineno;

  const auto header = split_row(line, delimiter);
  long time_idx = -1, price_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == columns.time) time_idx = static_cast<long>(i);
    if (header[i] == columns.price) price_idx = static_cast<long>(i);
  }
  if (time_idx < 0)
    throw std::runtime_error(filename + ": missing time column '" + columns.time + "'");
  if (price_idx < 0)
    throw std::runtime_error(filename + ": missing price column '" + columns.price + "'");

  TickSeries ticks;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto row = split_row(line, delimiter);
    if (static_cast<long>(row.size()) <= std::max(time_idx, price_idx))
      throw std::runtime_error(filename + ": line " + std::to_string(lineno) +
                               ": too few columns");
    const double t = parse_number(row[time_idx], "timestamp", lineno);
    const double p = parse_number(row[price_idx], "price", lineno);
    if (!ticks.timestamps.empty() && t <= ticks.timestamps.back())
      throw std::runtime_error(filename + ": line " + std::to_string(lineno) +
                               ": timestamp not strictly increasing");
    if (require_positive && p <= 0.0)
      throw std::runtime_error(filename + ": line " + std::to_string(lineno) +
                               ": price must be positive");
    ticks.timestamps.push_back(t);
    ticks.prices.push_back(p);
  }
  if (ticks.timestamps.size() < 2)
    throw std::runtime_error(filename + ": need at least two ticks");
  return ticks;
}

Observations regularize(const TickSeries& ticks, long n, PriceTransform transform,
                        std::vector<std::string>* diagnostics) {
  if (n < 16) throw std::invalid_argument("regularize: n must be >= 16");
  const std::size_t count = ticks.timestamps.size();
  if (count < 2 || ticks.prices.size() != count)
    throw std::invalid_argument("regularize: malformed tick series");

  if (diagnostics && static_cast<long>(count) < n + 1)
    diagnostics->push_back("sparse ticks: " + std::to_string(count) +
                           " ticks for " + std::to_string(n + 1) +
                           " grid points; previous-tick sampling will repeat values");

  const double t0 = ticks.timestamps.front();
  const double span = ticks.timestamps.back() - t0;

  Observations obs;
  obs.n = n;
  obs.noise_omega2 = 0.0;
  obs.y.resize(n + 1);
  std::size_t j = 0;  // last tick index with rescaled time <= grid time
  for (long i = 0; i <= n; ++i) {
    const double grid = static_cast<double>(i) / static_cast<double>(n);
    while (j + 1 < count && (ticks.timestamps[j + 1] - t0) / span <= grid) ++j;
    const double p = ticks.prices[j];
    if (transform == PriceTransform::log && p <= 0.0)
      throw std::invalid_argument("regularize: nonpositive price under log transform");
    obs.y[i] = transform == PriceTransform::log ? std::log(p) : p;
  }
  return obs;
}

}  // namespace mbv
