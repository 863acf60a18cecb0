#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaytune/sim.hpp"
#include "relaytune/tuning.hpp"

namespace relaytune::cli {

enum class TuningMethod { Ah, Kc, Kr };

TuningMethod parse_method(std::string_view name);
std::string_view to_string(TuningMethod method) noexcept;

/// Default phase margin per method: 50 deg for KC, 70 deg for KR.
double default_phase_margin(TuningMethod method) noexcept;

struct TuneRequest {
    FopdtModel model;
    TuningMethod method = TuningMethod::Kc;
    double pm_deg = 50.0;  ///< used by KC and KR
    double relay_d = 1.0;
    double hysteresis = 0.0;
    SimConfig cfg;
};

struct TuneOutcome {
    RelayOutcome relay;  ///< plain relay run
    SimTrace relay_trace;
    std::optional<double> extra_delay;  ///< KR only
    std::optional<RelayOutcome> delayed_relay;
    std::optional<SimTrace> delayed_trace;
    CriticalPoint critical;  ///< the point the rule was applied to
    PidGains gains;
    std::vector<std::string> warnings;
};

/// Relay experiment(s) followed by the chosen rule. For KR: plain run for Tc,
/// extra delay (PM - 37)/360 Tc, second delayed run, then the KR rule.
TuneOutcome run_tuning(const TuneRequest& request);

}  // namespace relaytune::cli
