#include "relaytune/tuning.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune {

namespace {

constexpr double kDerivativeToIntegral = 0.25;

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace

void validate(const CriticalPoint& cp) {
    if (!std::isfinite(cp.kc) || cp.kc <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "critical gain must be finite and > 0");
    if (!std::isfinite(cp.tc) || cp.tc <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "critical period must be finite and > 0");
}

std::optional<std::string> phase_margin_warning(double pm_deg) {
    if (pm_deg >= kRecommendedPmLow && pm_deg <= kRecommendedPmHigh) return std::nullopt;
    return fmt::format("phase margin {} deg is outside the recommended {}..{} deg range", pm_deg,
                       kRecommendedPmLow, kRecommendedPmHigh);
}

PidGains tune_ah(const CriticalPoint& cp) {
    validate(cp);
    const double ti = 0.5 * cp.tc;
    return {0.6 * cp.kc, ti, kDerivativeToIntegral * ti};
}

TuningResult tune_kc(const CriticalPoint& cp, double pm_deg) {
    validate(cp);
    if (!(pm_deg > 0.0 && pm_deg < 90.0))
        throw Error(ErrorKind::InvalidPhaseMargin,
                    fmt::format("phase margin {} deg must lie in (0, 90)", pm_deg));
    const double pm = radians(pm_deg);
    const double ti = cp.tc * (1.0 + std::sin(pm)) / (std::numbers::pi * std::cos(pm));
    TuningResult result{{cp.kc * std::cos(pm), ti, kDerivativeToIntegral * ti}, {}};
    if (auto w = phase_margin_warning(pm_deg)) result.warnings.push_back(std::move(*w));
    return result;
}

double kr_extra_delay(double pm_deg, double tc) {
    if (!std::isfinite(pm_deg) || pm_deg < 37.0)
        throw Error(ErrorKind::InvalidPhaseMargin,
                    fmt::format("phase margin {} deg below 37 gives a negative delay", pm_deg));
    if (!std::isfinite(tc) || tc <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "critical period must be > 0");
    return (pm_deg - 37.0) / 360.0 * tc;
}

PidGains tune_kr(const CriticalPoint& cp) {
    validate(cp);
    const double ti = 0.64 * cp.tc;
    return {0.8 * cp.kc, ti, kDerivativeToIntegral * ti};
}

}  // namespace relaytune
