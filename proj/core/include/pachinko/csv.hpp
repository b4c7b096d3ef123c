#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pachinko::csv {

// Minimal RFC-4180 CSV support: quoted fields, embedded commas/quotes/newlines.
// Rows are vectors of unescaped field strings.

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line number of the row start, for error messages
};

// Reads a whole file. Throws ParseError on unterminated quotes.
std::vector<Row> read_file(const std::string& path);

// Parses CSV text (used by round-trip tests).
std::vector<Row> parse(std::string_view text, const std::string& origin = "<string>");

std::string escape_field(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// All floating-point emission goes through this: 17 significant digits, so
// doubles round-trip bit-exactly and repeated runs are byte-identical.
std::string format_double(double v);

std::string format_int(long long v);

}  // namespace pachinko::csv
