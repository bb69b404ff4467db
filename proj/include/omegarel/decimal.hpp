#pragma once

#include <optional>
#include <string>

namespace omegarel {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_decimal(double x);

/// Strict full-string double parse; nullopt on any trailing garbage.
std::optional<double> parse_decimal(const std::string& s);

} // namespace omegarel
