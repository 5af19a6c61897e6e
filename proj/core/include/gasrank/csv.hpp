#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gasrank::csv {

struct Row {
  std::size_t line = 0;  // 1-based, header is line 1
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of a header column; throws DataError naming `source` if missing.
  std::size_t column(std::string_view name, std::string_view source) const;
};

// Comma-delimited, header row, optional double-quoted fields ("" escapes a
// quote). Accepts LF or CRLF. Blank lines are skipped. Throws DataError.
Table read(std::istream& in, std::string_view source);
Table read_file(const std::string& path);

// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace gasrank::csv
