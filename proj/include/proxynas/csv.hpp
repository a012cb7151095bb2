#pragma once

#include <string>
#include <vector>

namespace proxynas {

/// Minimal CSV support: comma separator, double-quote quoting with doubled
/// quotes as escapes, quoted fields may span lines.  Enough for the file
/// formats this toolkit emits and ingests.
namespace csv {

using Row = std::vector<std::string>;

/// Parses a whole document.  Throws ParseError on unterminated quotes.
std::vector<Row> parse(const std::string& text);

/// Quotes a field only when needed.
std::string escape_field(const std::string& field);

std::string join_row(const Row& row);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

} // namespace csv

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace proxynas
