// Portable tables: one '#'-prefixed JSON header line, one CSV column line,
// then numeric rows printed with %.17g so a written table reads back
// bit-for-bit.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace branewave {

struct Table {
  nlohmann::json header = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

// Serialized form; identical tables give identical bytes.
std::string format_table(const Table& t);
Table parse_table(const std::string& text);

void write_table(const std::string& path, const Table& t);
Table read_table(const std::string& path);

}  // namespace branewave
