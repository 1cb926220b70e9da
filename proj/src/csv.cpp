#include "qrivx/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qrivx {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Index CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<Index>(i);
  throw DataError("missing column '" + name + "'");
}

std::vector<std::string> CsvTable::column_text(const std::string& name) const {
  const auto idx = static_cast<std::size_t>(column_index(name));
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

Vector CsvTable::column_numeric(const std::string& name) const {
  const auto idx = static_cast<std::size_t>(column_index(name));
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = rows[r][idx];
    if (cell.empty())
      throw DataError("missing value in column '" + name + "' at data row " +
                      std::to_string(r + 1));
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw DataError("non-numeric value '" + cell + "' in column '" + name +
                      "' at data row " + std::to_string(r + 1));
    }
    if (pos != cell.size())
      throw DataError("non-numeric value '" + cell + "' in column '" + name +
                      "' at data row " + std::to_string(r + 1));
    if (!std::isfinite(v))
      throw DataError("non-finite value in column '" + name + "' at data row " +
                      std::to_string(r + 1));
    out[static_cast<Index>(r)] = v;
  }
  return out;
}

CsvTable parse_csv(const std::string& content, const std::string& origin) {
  CsvTable table;
  std::stringstream ss(content);
  std::string line;
  if (!std::getline(ss, line)) throw DataError(origin + ": empty file");
  table.header = split_line(strip_cr(line));
  if (table.header.empty()) throw DataError(origin + ": empty header");
  std::size_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw DataError(origin + ": line " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) throw DataError(origin + ": no data rows");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace qrivx
