#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crawl/sim.hpp"

namespace crawl {

inline constexpr const char* kLogSchema = "crawl-log v1";

/// Column-stable CSV (schema line, header row, %.9g values).
void write_log_csv(const SimLog& log, std::ostream& out);
std::string log_csv_string(const SimLog& log);

/// Run summary as JSON (stable key order, %.9g-rounded numbers).
std::string summary_json(const SimLog& log);

/// Extract named channels from a written log CSV as aligned text columns
/// (gnuplot-ready). Throws std::invalid_argument for unknown or non-numeric
/// channels, listing what is available.
std::string plot_channels(std::istream& csv, const std::vector<std::string>& channels);

}  // namespace crawl
