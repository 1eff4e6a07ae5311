#pragma once

// Locale-independent number formatting and delimited-line helpers.

#include <charconv>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verdoorn::text {

std::vector<std::string_view> split(std::string_view line, char delimiter);

std::string_view trim(std::string_view s);

/// Shortest representation that parses back to the same double.
std::string round_trip(double value);

/// Fixed-point with `decimals` digits; "-0.000" is normalized to "0.000".
std::string fixed(double value, int decimals);

/// Whole-field parse; nullopt if the field is empty or has trailing junk.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

/// Reads one line, dropping a trailing '\r'. Returns false at end of stream.
bool read_line(std::istream& in, std::string& line);

/// Number of code points in a UTF-8 string (display width for our glyphs).
std::size_t display_width(std::string_view s);

}  // namespace verdoorn::text
