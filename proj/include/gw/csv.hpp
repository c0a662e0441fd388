#pragma once

#include <string>
#include <vector>

namespace gw {

using CsvRow = std::vector<std::string>;

// RFC-4180 quoting: fields containing a comma, quote, or line break are
// wrapped in double quotes with embedded quotes doubled.
std::string csv_field(const std::string& s);

std::string csv_render(const std::vector<CsvRow>& rows);
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

// Parses RFC-4180 content (quoted fields, embedded separators, CRLF or LF).
std::vector<CsvRow> parse_csv(const std::string& text);
std::vector<CsvRow> read_csv(const std::string& path);

// Deterministic shortest-round-trip rendering of a double for CSV cells.
std::string csv_num(double v);

}  // namespace gw
