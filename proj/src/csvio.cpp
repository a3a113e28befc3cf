#include "qsw/csvio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsw/errors.hpp"

namespace qsw::csvio {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for write: " + path);
  for (const auto& c : table.comments) out << "# " << c << "\n";
  for (size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << "\n";
  }
  if (!out) throw ValidationError("write failed: " + path);
}

static std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

Table read_csv(const std::string& path,
               const std::vector<std::string>& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open for read: " + path);
  Table table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(line.substr(line.size() > 1 && line[1] == ' '
                                               ? 2 : 1));
      continue;
    }
    if (!have_header) {
      table.header = split(line);
      if (!expected_header.empty() && table.header != expected_header) {
        std::string missing;
        for (const auto& name : expected_header) {
          if (std::find(table.header.begin(), table.header.end(), name) ==
              table.header.end()) {
            missing += (missing.empty() ? "" : ", ") + name;
          }
        }
        throw SchemaError("line " + std::to_string(line_no) +
                          ": unexpected header in " + path +
                          (missing.empty() ? ""
                                           : "; missing column " + missing));
      }
      have_header = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(cells[i], &pos));
        if (pos != cells[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw SchemaError("line " + std::to_string(line_no) + ", column " +
                          std::to_string(i + 1) + ": not a number: '" +
                          cells[i] + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw SchemaError("missing header row in " + path);
  return table;
}

}  // namespace qsw::csvio
