#pragma once

#include <string>
#include <vector>

namespace causaldr::csvio {

// Fixed formatting so repeated runs emit byte-identical files.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws IoError when absent.
  std::size_t column(const std::string& name) const;
};

// Minimal RFC-style reader: quoted fields, embedded commas and doubled
// quotes supported; no multi-line fields.
Table read_csv(const std::string& path);

void write_csv(const std::string& path, const Table& table);

void write_text(const std::string& path, const std::string& text);

std::string read_text(const std::string& path);

}  // namespace causaldr::csvio
