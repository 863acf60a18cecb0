#include "relaytune/model.hpp"

#include <cmath>
#include <string>

#include "relaytune/error.hpp"

namespace relaytune {

void validate(const FopdtModel& model) {
    if (!std::isfinite(model.gain_kp) || model.gain_kp == 0.0)
        throw Error(ErrorKind::InvalidModel, "plant gain must be finite and nonzero");
    if (!std::isfinite(model.tau) || model.tau <= 0.0)
        throw Error(ErrorKind::InvalidModel, "plant time constant must be > 0");
    if (!std::isfinite(model.dead_time) || model.dead_time < 0.0)
        throw Error(ErrorKind::InvalidModel, "plant dead time must be >= 0");
}

void validate(const PidGains& gains) {
    if (!std::isfinite(gains.kp) || gains.kp <= 0.0)
        throw Error(ErrorKind::InvalidGains, "kp must be > 0");
    if (!std::isfinite(gains.ti) || gains.ti <= 0.0)
        throw Error(ErrorKind::InvalidGains, "ti must be > 0");
    if (!std::isfinite(gains.td) || gains.td < 0.0)
        throw Error(ErrorKind::InvalidGains, "td must be >= 0");
}

void validate(const ParallelGains& gains) {
    if (!std::isfinite(gains.kp) || gains.kp <= 0.0)
        throw Error(ErrorKind::InvalidGains, "KP must be > 0");
    if (!std::isfinite(gains.ki) || gains.ki < 0.0)
        throw Error(ErrorKind::InvalidGains, "KI must be >= 0");
    if (!std::isfinite(gains.kd) || gains.kd < 0.0)
        throw Error(ErrorKind::InvalidGains, "KD must be >= 0");
}

void validate(const SimTrace& trace) {
    if (!(trace.dt > 0.0) || !std::isfinite(trace.dt))
        throw Error(ErrorKind::InvalidArgument, "trace dt must be > 0");
    const auto n = trace.output.size();
    if (n < 2 || trace.setpoint.size() != n || trace.control.size() != n)
        throw Error(ErrorKind::InvalidArgument,
                    "trace columns must have equal length >= 2 (got " + std::to_string(n) + ")");
}

ParallelGains to_parallel(const PidGains& gains) {
    validate(gains);
    return {gains.kp, gains.kp / gains.ti, gains.kp * gains.td};
}

PidGains from_parallel(const ParallelGains& gains) {
    validate(gains);
    if (gains.ki == 0.0)
        throw Error(ErrorKind::InvalidGains, "KI = 0 gives an unbounded integral time");
    return {gains.kp, gains.kp / gains.ki, gains.kd / gains.kp};
}

}  // namespace relaytune
