#pragma once

#include <string>
#include <vector>

#include "qrivx/types.hpp"

namespace qrivx {

// Minimal strict CSV: comma separated, first row is the header, no quoting,
// no missing cells. Anything else is a DataError naming the spot.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Index column_index(const std::string& name) const;  // throws if absent
  std::vector<std::string> column_text(const std::string& name) const;
  Vector column_numeric(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& content, const std::string& origin);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qrivx
