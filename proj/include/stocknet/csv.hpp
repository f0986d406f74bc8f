#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stocknet::csv {

/// A comma-separated table: one header row plus data rows, each remembering
/// the 1-based line it came from.
struct Table {
  std::vector<std::string> header;
  struct Row {
    std::size_t line = 0;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
};

/// Reads a whole table. Accepts LF or CRLF, strips a UTF-8 BOM, skips blank
/// lines and trims ASCII whitespace around cells. Rows whose cell count differs
/// from the header raise ParseError.
Table read_table(std::istream& in);

std::vector<std::string> split_line(std::string_view line);

/// Strict decimal parse of the whole cell; throws ParseError at (line, column).
double parse_number(std::string_view cell, std::size_t line, const std::string& column);

/// Ten significant digits, the precision used for every numeric output.
std::string format_number(double value);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace stocknet::csv
