#include "branewave/table_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace branewave {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("Table::add_row: width mismatch");
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("Table: no column " + name);
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t k = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

std::string format_table(const Table& t) {
  std::string out = "# " + t.header.dump() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Table parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("parse_table: missing JSON header");
  t.header = nlohmann::json::parse(line.substr(2));
  if (!std::getline(in, line)) throw std::runtime_error("parse_table: missing column line");
  {
    std::istringstream cols(line);
    std::string c;
    while (std::getline(cols, c, ',')) t.columns.push_back(c);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      row.push_back(std::strtod(p, &end));
      if (end == p) throw std::runtime_error("parse_table: bad number");
      p = end;
      if (*p == ',') ++p;
    }
    t.add_row(std::move(row));
  }
  return t;
}

void write_table(const std::string& path, const Table& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_table: cannot open " + path);
  f << format_table(t);
  if (!f) throw std::runtime_error("write_table: write failed for " + path);
}

Table read_table(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_table: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_table(ss.str());
}

}  // namespace branewave
