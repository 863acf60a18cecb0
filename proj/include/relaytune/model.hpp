/**
 * @file model.hpp
 * @brief Core value types: plant model, PID gain forms and sampled traces.
 *
 * Plant:      G(s) = K e^{-theta s} / (tau s + 1)
 * Controller: C(s) = Kp (1 + 1/(Ti s) + Td s)           (non-interacting)
 *           = KP + KI/s + KD s                          (parallel)
 */

#pragma once

#include <cstddef>
#include <vector>

namespace relaytune {

/// First-order-plus-dead-time plant.
struct FopdtModel {
    double gain_kp = 1.0;    ///< output units per input unit, nonzero
    double tau = 1.0;        ///< time constant [s], > 0
    double dead_time = 0.0;  ///< transport delay [s], >= 0
};

/// Non-interacting PID in time-constant form. td = 0 is a PI controller.
struct PidGains {
    double kp = 1.0;  ///< proportional gain, > 0
    double ti = 1.0;  ///< integral time [s], > 0
    double td = 0.0;  ///< derivative time [s], >= 0
};

/// Parallel PID gains, used by the analog circuit.
struct ParallelGains {
    double kp = 1.0;  ///< > 0
    double ki = 0.0;  ///< [1/s], >= 0
    double kd = 0.0;  ///< [s], >= 0
};

/// Uniformly sampled loop signals; sample k is at t0 + k*dt.
struct SimTrace {
    double dt = 0.01;
    double t0 = 0.0;
    std::vector<double> setpoint;
    std::vector<double> control;
    std::vector<double> output;

    std::size_t size() const noexcept { return output.size(); }
    double time_at(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
};

// Each validate() throws relaytune::Error when the value breaks its invariants.
void validate(const FopdtModel& model);
void validate(const PidGains& gains);
void validate(const ParallelGains& gains);
void validate(const SimTrace& trace);

ParallelGains to_parallel(const PidGains& gains);
PidGains from_parallel(const ParallelGains& gains);

}  // namespace relaytune
