#include "relaytune/cli/units.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune::cli {

namespace {

struct Prefix {
    std::string_view symbol;
    int exponent;
};

// Longest symbols first so "µ" (two bytes) is matched before single letters.
constexpr std::array<Prefix, 10> kPrefixes = {{{"\xC2\xB5", -6},
                                               {"p", -12},
                                               {"n", -9},
                                               {"u", -6},
                                               {"m", -3},
                                               {"k", 3},
                                               {"K", 3},
                                               {"M", 6},
                                               {"G", 9},
                                               {"", 0}}};

void strip_suffix(std::string_view& s, std::string_view suffix) {
    if (s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix)
        s.remove_suffix(suffix.size());
}

}  // namespace

double parse_engineering(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    for (std::string_view unit : {"\xCE\xA9", "ohms", "ohm", "Ohm", "F"}) strip_suffix(s, unit);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);

    int exponent = 0;
    for (const auto& p : kPrefixes) {
        if (p.symbol.empty()) break;
        if (s.size() > p.symbol.size() && s.substr(s.size() - p.symbol.size()) == p.symbol) {
            exponent = p.exponent;
            s.remove_suffix(p.symbol.size());
            break;
        }
    }
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
        throw ParseError(0, fmt::format("cannot parse value '{}'", text));
    return value * std::pow(10.0, exponent);
}

std::string format_engineering(double value, std::string_view unit) {
    if (value == 0.0) return fmt::format("0.000 {}", unit);
    if (!std::isfinite(value)) return fmt::format("{} {}", value, unit);
    int exponent = static_cast<int>(std::floor(std::log10(std::abs(value)) / 3.0)) * 3;
    exponent = std::clamp(exponent, -12, 9);
    double scaled = value / std::pow(10.0, exponent);
    // Rounding to four significant digits can carry into the next prefix.
    if (std::abs(std::stod(fmt::format("{:.4g}", scaled))) >= 1000.0 && exponent < 9) {
        exponent += 3;
        scaled /= 1000.0;
    }
    std::string_view symbol;
    for (const auto& p : kPrefixes)
        if (p.exponent == exponent && p.symbol != "u" && p.symbol != "K") {
            symbol = p.symbol;
            break;
        }
    const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(scaled))));
    const int decimals = std::max(0, 3 - magnitude);
    return fmt::format("{:.{}f} {}{}", scaled, decimals, symbol, unit);
}

}  // namespace relaytune::cli
