#include "relaytune/error.hpp"

namespace relaytune {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::InvalidGains: return "InvalidGains";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::NoLimitCycle: return "NoLimitCycle";
        case ErrorKind::Diverged: return "Diverged";
        case ErrorKind::MetricsUndefined: return "MetricsUndefined";
        case ErrorKind::NoOverlap: return "NoOverlap";
        case ErrorKind::NoStep: return "NoStep";
        case ErrorKind::InsufficientResponse: return "InsufficientResponse";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::InvalidPhaseMargin: return "InvalidPhaseMargin";
        case ErrorKind::InvalidTarget: return "InvalidTarget";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace relaytune
