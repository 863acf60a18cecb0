#include "relaytune/cli/pipeline.hpp"

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune::cli {

TuningMethod parse_method(std::string_view name) {
    if (name == "ah" || name == "AH") return TuningMethod::Ah;
    if (name == "kc" || name == "KC") return TuningMethod::Kc;
    if (name == "kr" || name == "KR") return TuningMethod::Kr;
    throw Error(ErrorKind::InvalidArgument, fmt::format("unknown tuning method '{}'", name));
}

std::string_view to_string(TuningMethod method) noexcept {
    switch (method) {
        case TuningMethod::Ah: return "ah";
        case TuningMethod::Kc: return "kc";
        case TuningMethod::Kr: return "kr";
    }
    return "?";
}

double default_phase_margin(TuningMethod method) noexcept {
    return method == TuningMethod::Kr ? 70.0 : 50.0;
}

TuneOutcome run_tuning(const TuneRequest& request) {
    RelaySettings relay{request.relay_d, request.hysteresis, 0.0};
    auto [first, first_trace] = relay_experiment(request.model, relay, request.cfg);

    TuneOutcome out{first, std::move(first_trace), {}, {}, {}, {first.critical_gain_kc, first.period_tc},
                    {}, {}};
    switch (request.method) {
        case TuningMethod::Ah:
            out.gains = tune_ah(out.critical);
            break;
        case TuningMethod::Kc: {
            auto result = tune_kc(out.critical, request.pm_deg);
            out.gains = result.gains;
            out.warnings = std::move(result.warnings);
            break;
        }
        case TuningMethod::Kr: {
            const double delay = kr_extra_delay(request.pm_deg, first.period_tc);
            if (auto w = phase_margin_warning(request.pm_deg)) out.warnings.push_back(*w);
            relay.extra_delay = delay;
            auto [second, second_trace] = relay_experiment(request.model, relay, request.cfg);
            out.extra_delay = delay;
            out.delayed_relay = second;
            out.delayed_trace = std::move(second_trace);
            out.critical = {second.critical_gain_kc, second.period_tc};
            out.gains = tune_kr(out.critical);
            break;
        }
    }
    return out;
}

}  // namespace relaytune::cli
