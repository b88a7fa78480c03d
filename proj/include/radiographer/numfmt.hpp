#pragma once

#include <string>
#include <string_view>

namespace radiographer {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// Strict full-token parse; throws std::invalid_argument on trailing junk or empty input.
double parse_number(std::string_view token);
long long parse_integer(std::string_view token);

}  // namespace radiographer
