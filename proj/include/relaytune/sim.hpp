/**
 * @file sim.hpp
 * @brief Fixed-step simulation of an FOPDT plant: open loop, relay feedback
 *        and closed loop with a non-interacting PID.
 *
 * The plant lag uses exact zero-order-hold discretization
 *   x[k+1] = a x[k] + K (1 - a) u[k - n],   a = exp(-dt / tau)
 * with the dead time quantized to n = round(dead_time / dt) samples.
 * The plant output is initial_output + x.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "relaytune/model.hpp"

namespace relaytune {

struct SimConfig {
    double dt = 0.01;         ///< [s]
    double duration = 100.0;  ///< [s]
    double initial_output = 0.0;
};

/// Throws ConfigError when dt/duration are unusable or dt > dead_time / 5.
void validate(const SimConfig& cfg, const FopdtModel& model);

/// Samples in a run: t = 0, dt, ..., duration.
std::size_t sample_count(const SimConfig& cfg);

/// Discrete plant state: lag plus integer-sample delay line.
class FopdtPlant {
public:
    FopdtPlant(const FopdtModel& model, double dt, double extra_delay = 0.0,
               double initial_output = 0.0);

    double output() const noexcept { return offset_ + state_; }

    /// Feeds the input held over the next sample and advances one step.
    void step(double input);

    std::size_t delay_samples() const noexcept { return delay_.size(); }

private:
    double alpha_;
    double input_gain_;
    double offset_;
    double state_ = 0.0;
    std::vector<double> delay_;  // ring buffer of pending inputs
    std::size_t head_ = 0;
};

/// Drives the plant with `input` (length sample_count(cfg)). The setpoint
/// column of the trace is zero and the control column echoes the input.
SimTrace simulate_open_loop(const FopdtModel& model, std::span<const double> input,
                            const SimConfig& cfg);

struct RelayOutcome {
    double amplitude_a = 0.0;       ///< half peak-to-peak of the plant output
    double period_tc = 0.0;         ///< [s]
    double critical_gain_kc = 0.0;  ///< 4 d / (pi a)
    int cycles_used = 0;
};

struct RelaySettings {
    double relay_d = 1.0;
    double hysteresis = 0.0;
    double extra_delay = 0.0;  ///< transport delay inserted ahead of the plant [s]
};

/// Warm-up cycles skipped and cycles averaged by relay_experiment.
inline constexpr int kRelayWarmupCycles = 5;
inline constexpr int kRelayMeasuredCycles = 5;

/// 4 d / (pi a). Throws InvalidArgument unless both are > 0.
double critical_gain(double relay_d, double amplitude_a);

/// Relay feedback around the plant regulating to zero. The relay starts at +d
/// (error is exactly 0 at rest). Throws NoLimitCycle when fewer than ten full
/// cycles occur, the last five periods disagree by more than 1%, or the
/// period is not resolved by the sampling (< 10 samples).
std::pair<RelayOutcome, SimTrace> relay_experiment(const FopdtModel& model,
                                                   const RelaySettings& relay,
                                                   const SimConfig& cfg);

enum class DerivativeMode {
    OnMeasurement,  ///< d/dt of -output; no set-point kick
    OnError,        ///< d/dt of setpoint - output
};

struct Saturation {
    double low;
    double high;
};

struct LoopScenario {
    double setpoint_step = 1.0;           ///< applied at t = 0
    double disturbance_magnitude = -0.5;  ///< added at the plant input
    double disturbance_time = 50.0;
    double derivative_filter_n = 10.0;    ///< derivative lag is td / N
    DerivativeMode derivative_mode = DerivativeMode::OnMeasurement;
    std::optional<Saturation> saturation;
};

/// u = kp (e + (1/ti) int e dt + td d/dt(filtered)) with a trapezoidal
/// integral and no anti-windup. The control column holds the controller output
/// (before the disturbance is added). Throws DivergedError on non-finite state.
SimTrace simulate_closed_loop(const FopdtModel& model, const PidGains& gains,
                              const LoopScenario& scenario, const SimConfig& cfg);

struct Metrics {
    double initial_value = 0.0;
    double final_value = 0.0;  ///< mean of the last 10% of the step segment
    double peak_value = 0.0;
    double overshoot_percent = 0.0;
    std::optional<double> settling_time;  ///< relative to trace start
    std::optional<double> recovery_time;  ///< relative to the disturbance
};

/// Step-response metrics over the segment before `disturbance_time` (or the
/// whole trace), plus disturbance recovery. Throws MetricsUndefined when the
/// step segment has zero net change.
Metrics compute_metrics(const SimTrace& trace, double band_fraction,
                        std::optional<double> disturbance_time = std::nullopt);

}  // namespace relaytune
