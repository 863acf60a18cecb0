#pragma once

#include <string>
#include <string_view>

namespace relaytune::cli {

/// Parses "4.7k", "220u", "220µF", "1.5 MΩ", "1e3". A trailing unit symbol
/// (Ω, ohm, F) is ignored. Throws ParseError on malformed input.
double parse_engineering(std::string_view text);

/// "46.50 kΩ" style: four significant digits with an SI prefix.
std::string format_engineering(double value, std::string_view unit);

}  // namespace relaytune::cli
