#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fraudring::csv {

/// Splits one CSV line into fields. Supports RFC 4180 double-quote escaping
/// within a single physical line; a trailing '\r' is ignored. Returns
/// nullopt for an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Writes one CSV row terminated by '\n'.
void write_row(std::ostream& os, const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

/// Strips a UTF-8 byte-order mark and surrounding whitespace.
std::string_view trim(std::string_view s);

}  // namespace fraudring::csv
