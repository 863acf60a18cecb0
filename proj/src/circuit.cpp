#include "relaytune/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune {

namespace {

constexpr std::array<int, 12> kE12 = {10, 12, 15, 18, 22, 27, 33, 39, 47, 56, 68, 82};
constexpr std::array<int, 24> kE24 = {10, 11, 12, 13, 15, 16, 18, 20, 22, 24, 27, 30,
                                      33, 36, 39, 43, 47, 51, 56, 62, 68, 75, 82, 91};

double deviation(double target, double achieved) {
    const double diff = std::abs(achieved - target);
    return target == 0.0 ? diff : diff / std::abs(target);
}

void check_passives(double r3, double c1, double c2) {
    for (double v : {r3, c1, c2})
        if (!std::isfinite(v) || v <= 0.0)
            throw Error(ErrorKind::InvalidArgument, "R3, C1 and C2 must be finite and > 0");
}

void check_target(const ParallelGains& target) {
    try {
        validate(target);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidTarget, e.what());
    }
    if (target.ki == 0.0) throw Error(ErrorKind::InvalidTarget, "target KI must be > 0");
}

}  // namespace

void validate(const CircuitDesign& d) {
    for (double v : {d.r1, d.r3, d.r4, d.c1, d.c2})
        if (!std::isfinite(v) || v <= 0.0)
            throw Error(ErrorKind::InvalidArgument, "R1, R3, R4, C1, C2 must be finite and > 0");
    if (!std::isfinite(d.r2) || d.r2 < 0.0)
        throw Error(ErrorKind::InvalidArgument, "R2 must be finite and >= 0");
}

double ConsistencyReport::worst() const noexcept {
    return std::max({error_kp, error_ki, error_kd});
}

bool ConsistencyReport::consistent(double tolerance) const noexcept { return worst() <= tolerance; }

ConsistencyReport compare_gains(const ParallelGains& target, const ParallelGains& achieved) {
    return {target, achieved, deviation(target.kp, achieved.kp), deviation(target.ki, achieved.ki),
            deviation(target.kd, achieved.kd)};
}

ParallelGains circuit_gains(const CircuitDesign& d) {
    validate(d);
    const double ki = d.r4 / (d.r3 * d.r1 * d.c2);
    return {ki * (d.r1 * d.c1 + d.r2 * d.c2), ki, ki * d.r2 * d.c1};
}

SynthesisResult synthesize_paper_mode(const ParallelGains& target, double r3, double c1,
                                      double c2) {
    check_target(target);
    check_passives(r3, c1, c2);
    CircuitDesign d{};
    d.r3 = r3;
    d.c1 = c1;
    d.c2 = c2;
    d.r1 = target.kp / (2.0 * target.ki * c2);
    d.r2 = target.kp / (2.0 * target.ki * c1);
    d.r4 = target.ki * r3 * d.r1 * c2;
    return {d, compare_gains(target, circuit_gains(d))};
}

SynthesisResult synthesize_exact(const ParallelGains& target, double r3, double c1, double c2) {
    check_target(target);
    check_passives(r3, c1, c2);
    if (target.kp * c1 <= target.kd * c2) {
        const double min_c1 = target.kd * c2 / target.kp;
        throw InfeasibleError(
            min_c1, fmt::format("KP*C1 = {:.6g} <= KD*C2 = {:.6g}; C1 must exceed {:.6g} F",
                                target.kp * c1, target.kd * c2, min_c1));
    }
    CircuitDesign d{};
    d.r3 = r3;
    d.c1 = c1;
    d.c2 = c2;
    d.r2 = target.kd / (target.ki * c1);
    d.r1 = (target.kp * c1 - target.kd * c2) / (target.ki * c1 * c1);
    d.r4 = target.ki * r3 * d.r1 * c2;
    return {d, compare_gains(target, circuit_gains(d))};
}

std::span<const int> series_values(ResistorSeries series) {
    switch (series) {
        case ResistorSeries::E12: return kE12;
        case ResistorSeries::E24: return kE24;
        case ResistorSeries::None: break;
    }
    return {};
}

double snap_resistor(double ohms, ResistorSeries series) {
    if (series == ResistorSeries::None || ohms <= 0.0 || !std::isfinite(ohms)) return ohms;
    const int decade = static_cast<int>(std::floor(std::log10(ohms)));
    // Candidates span this decade plus the first value of the next one.
    const double unit = std::pow(10.0, decade - 1);
    double best = 100.0 * unit;
    double best_distance = std::abs(std::log(best / ohms));
    for (int base : series_values(series)) {
        for (int shift : {-1, 0}) {
            const double candidate = base * unit * std::pow(10.0, shift);
            const double distance = std::abs(std::log(candidate / ohms));
            if (distance < best_distance) {
                best = candidate;
                best_distance = distance;
            }
        }
    }
    return best;
}

SynthesisResult snap_to_series(const CircuitDesign& design, ResistorSeries series) {
    const auto original = circuit_gains(design);
    CircuitDesign snapped = design;
    snapped.r1 = snap_resistor(design.r1, series);
    snapped.r2 = snap_resistor(design.r2, series);
    snapped.r3 = snap_resistor(design.r3, series);
    snapped.r4 = snap_resistor(design.r4, series);
    return {snapped, compare_gains(original, circuit_gains(snapped))};
}

ResistorSeries parse_series(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "e12") return ResistorSeries::E12;
    if (lower == "e24") return ResistorSeries::E24;
    if (lower == "none") return ResistorSeries::None;
    throw Error(ErrorKind::InvalidArgument, fmt::format("unknown resistor series '{}'", name));
}

std::string_view to_string(ResistorSeries series) noexcept {
    switch (series) {
        case ResistorSeries::E12: return "e12";
        case ResistorSeries::E24: return "e24";
        case ResistorSeries::None: break;
    }
    return "none";
}

}  // namespace relaytune
