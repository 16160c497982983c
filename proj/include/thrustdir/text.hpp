// Small string helpers for the plain-text file formats.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace thrustdir::text {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Parses a full-string decimal number; throws ConfigError otherwise.
double parse_double(const std::string& s);

/// Shortest representation that round-trips exactly through parse_double.
std::string format_exact(double v);

}  // namespace thrustdir::text
