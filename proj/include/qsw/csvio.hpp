#pragma once

#include <string>
#include <vector>

namespace qsw::csvio {

// Minimal CSV with '#' comment lines, a mandatory header row, and numeric
// cells. Doubles are written with %.17g so round-trips are exact and output
// bytes are reproducible.

struct Table {
  std::vector<std::string> comments;  // without leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_double(double v);

void write_csv(const std::string& path, const Table& table);

// Throws SchemaError naming the offending 1-based line when the header does
// not match `expected_header` or a cell fails to parse.
Table read_csv(const std::string& path,
               const std::vector<std::string>& expected_header);

}  // namespace qsw::csvio
