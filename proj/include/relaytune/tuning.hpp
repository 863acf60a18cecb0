/**
 * @file tuning.hpp
 * @brief Relay-based PID tuning rules.
 *
 *   AH:  Kp = 0.6 Kc,        Ti = 0.5 Tc,                          Td = Ti / 4
 *   KC:  Kp = Kc cos(PM),    Ti = Tc (1 + sin PM) / (pi cos PM),   Td = Ti / 4
 *   KR:  Kp = 0.8 Kc,        Ti = 0.64 Tc,                         Td = Ti / 4
 *
 * KR expects the critical point of a second relay run with an extra transport
 * delay of (PM - 37)/360 * Tc inserted ahead of the plant.
 *
 * All phase margins are in DEGREES.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaytune/model.hpp"

namespace relaytune {

struct CriticalPoint {
    double kc = 1.0;  ///< critical gain
    double tc = 1.0;  ///< critical period [s]
};

void validate(const CriticalPoint& cp);

struct TuningResult {
    PidGains gains;
    std::vector<std::string> warnings;
};

inline constexpr double kRecommendedPmLow = 40.0;
inline constexpr double kRecommendedPmHigh = 70.0;

/// Warning text when `pm_deg` lies outside the recommended 40..70 degree range.
std::optional<std::string> phase_margin_warning(double pm_deg);

PidGains tune_ah(const CriticalPoint& cp);

/// Throws InvalidPhaseMargin unless 0 < pm_deg < 90.
TuningResult tune_kc(const CriticalPoint& cp, double pm_deg);

/// Extra relay-loop delay for the KR second run. Throws InvalidPhaseMargin for pm_deg < 37.
double kr_extra_delay(double pm_deg, double tc);

PidGains tune_kr(const CriticalPoint& cp);

}  // namespace relaytune
