#pragma once

#include <string>
#include <vector>

#include "mbv/simulate.hpp"

namespace mbv {

struct TickSeries {
  std::vector<double> timestamps;  // strictly increasing
  std::vector<double> prices;      // positive
};

struct TickColumns {
  std::string time = "t";
  std::string price = "y";
};

// Reads a delimited text file with a header row; rejects missing columns,
// unparseable rows and non-increasing timestamps, naming the offending line.
// require_positive guards prices destined for a log transform; series that
// already hold log prices may switch it off.
TickSeries load_ticks(const std::string& filename, const TickColumns& columns,
                      char delimiter = ',', bool require_positive = true);

enum class PriceTransform { log, raw };

// Maps ticks onto the equidistant grid i/n over the rescaled time span by
// previous-tick sampling (the first grid point takes the first tick). When
// fewer than about one tick per grid step is available a warning is appended
// to `diagnostics` (if given) rather than failing.
Observations regularize(const TickSeries& ticks, long n,
                        PriceTransform transform = PriceTransform::log,
                        std::vector<std::string>* diagnostics = nullptr);

}  // namespace mbv
