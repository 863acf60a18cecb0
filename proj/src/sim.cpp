#include "relaytune/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune {

namespace {

constexpr double kRunawayMagnitude = 1e150;

std::size_t delay_steps(double delay, double dt) {
    return static_cast<std::size_t>(std::llround(delay / dt));
}

}  // namespace

void validate(const SimConfig& cfg, const FopdtModel& model) {
    validate(model);
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0)
        throw Error(ErrorKind::ConfigError, "dt must be > 0");
    if (!std::isfinite(cfg.duration) || cfg.duration <= 0.0)
        throw Error(ErrorKind::ConfigError, "duration must be > 0");
    if (cfg.dt > cfg.duration)
        throw Error(ErrorKind::ConfigError, "dt must not exceed duration");
    if (!std::isfinite(cfg.initial_output))
        throw Error(ErrorKind::ConfigError, "initial output must be finite");
    if (model.dead_time > 0.0 && cfg.dt > model.dead_time / 5.0)
        throw Error(ErrorKind::ConfigError,
                    fmt::format("dt = {} too coarse for dead time {} (need dt <= {})", cfg.dt,
                                model.dead_time, model.dead_time / 5.0));
}

std::size_t sample_count(const SimConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt)) + 1;
}

FopdtPlant::FopdtPlant(const FopdtModel& model, double dt, double extra_delay,
                       double initial_output)
    : alpha_(std::exp(-dt / model.tau)),
      input_gain_(model.gain_kp * (1.0 - std::exp(-dt / model.tau))),
      offset_(initial_output),
      delay_(delay_steps(model.dead_time + extra_delay, dt), 0.0) {}

void FopdtPlant::step(double input) {
    double delayed = input;
    if (!delay_.empty()) {
        delayed = delay_[head_];
        delay_[head_] = input;
        head_ = (head_ + 1) % delay_.size();
    }
    state_ = alpha_ * state_ + input_gain_ * delayed;
}

SimTrace simulate_open_loop(const FopdtModel& model, std::span<const double> input,
                            const SimConfig& cfg) {
    validate(cfg, model);
    const auto n = sample_count(cfg);
    if (input.size() != n)
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("input has {} samples, expected {}", input.size(), n));

    FopdtPlant plant(model, cfg.dt, 0.0, cfg.initial_output);
    SimTrace trace{cfg.dt, 0.0, std::vector<double>(n, 0.0),
                   std::vector<double>(input.begin(), input.end()), {}};
    trace.output.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        trace.output.push_back(plant.output());
        plant.step(input[k]);
    }
    return trace;
}

double critical_gain(double relay_d, double amplitude_a) {
    if (!(relay_d > 0.0) || !(amplitude_a > 0.0) || !std::isfinite(relay_d) ||
        !std::isfinite(amplitude_a))
        throw Error(ErrorKind::InvalidArgument,
                    "relay magnitude and oscillation amplitude must be > 0");
    return 4.0 * relay_d / (std::numbers::pi * amplitude_a);
}

std::pair<RelayOutcome, SimTrace> relay_experiment(const FopdtModel& model,
                                                   const RelaySettings& relay,
                                                   const SimConfig& cfg) {
    validate(cfg, model);
    if (!(relay.relay_d > 0.0) || !std::isfinite(relay.relay_d))
        throw Error(ErrorKind::InvalidArgument, "relay magnitude must be > 0");
    if (!(relay.hysteresis >= 0.0) || !(relay.extra_delay >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "hysteresis and extra delay must be >= 0");

    const auto n = sample_count(cfg);
    FopdtPlant plant(model, cfg.dt, relay.extra_delay, cfg.initial_output);
    SimTrace trace{cfg.dt, 0.0, std::vector<double>(n, 0.0), {}, {}};
    trace.control.reserve(n);
    trace.output.reserve(n);

    std::vector<std::size_t> rising;
    double u = relay.relay_d;
    for (std::size_t k = 0; k < n; ++k) {
        const double y = plant.output();
        const double e = -y;
        const double previous = u;
        if (e >= relay.hysteresis)
            u = relay.relay_d;
        else if (e < -relay.hysteresis)
            u = -relay.relay_d;
        if (previous < 0.0 && u > 0.0) rising.push_back(k);
        trace.control.push_back(u);
        trace.output.push_back(y);
        plant.step(u);
    }

    constexpr int needed_periods = kRelayWarmupCycles + kRelayMeasuredCycles;
    if (rising.size() < static_cast<std::size_t>(needed_periods) + 1)
        throw Error(ErrorKind::NoLimitCycle,
                    fmt::format("only {} rising relay switchings in {} s (need {})", rising.size(),
                                cfg.duration, needed_periods + 1));

    const std::size_t last = rising.size() - 1;
    const std::size_t first = last - kRelayMeasuredCycles;
    double period_sum = 0.0;
    double amplitude_sum = 0.0;
    double period_min = INFINITY;
    double period_max = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double period = static_cast<double>(rising[i + 1] - rising[i]) * cfg.dt;
        period_sum += period;
        period_min = std::min(period_min, period);
        period_max = std::max(period_max, period);
        const auto begin = trace.output.begin() + static_cast<std::ptrdiff_t>(rising[i]);
        const auto end = trace.output.begin() + static_cast<std::ptrdiff_t>(rising[i + 1]);
        const auto [lo, hi] = std::minmax_element(begin, end);
        amplitude_sum += 0.5 * (*hi - *lo);
    }
    const double period = period_sum / kRelayMeasuredCycles;
    const double amplitude = amplitude_sum / kRelayMeasuredCycles;

    if (period < 10.0 * cfg.dt)
        throw Error(ErrorKind::NoLimitCycle,
                    fmt::format("oscillation period {} s is not resolved at dt = {} s (sampling "
                                "chatter, not a limit cycle)",
                                period, cfg.dt));
    if (period_max - period > 0.01 * period || period - period_min > 0.01 * period)
        throw Error(ErrorKind::NoLimitCycle,
                    fmt::format("relay periods not converged: {} .. {} s", period_min, period_max));
    if (!(amplitude > 0.0))
        throw Error(ErrorKind::NoLimitCycle, "relay oscillation has zero amplitude");

    RelayOutcome outcome{amplitude, period, critical_gain(relay.relay_d, amplitude),
                         kRelayMeasuredCycles};
    return {outcome, std::move(trace)};
}

SimTrace simulate_closed_loop(const FopdtModel& model, const PidGains& gains,
                              const LoopScenario& scenario, const SimConfig& cfg) {
    validate(cfg, model);
    validate(gains);
    if (!(scenario.derivative_filter_n > 0.0) || !std::isfinite(scenario.derivative_filter_n))
        throw Error(ErrorKind::InvalidArgument, "derivative filter N must be > 0");
    if (!std::isfinite(scenario.setpoint_step) ||
        !std::isfinite(scenario.disturbance_magnitude))
        throw Error(ErrorKind::InvalidArgument, "scenario values must be finite");
    if (scenario.disturbance_magnitude != 0.0 &&
        !(scenario.disturbance_time >= 0.0 && scenario.disturbance_time < cfg.duration))
        throw Error(ErrorKind::ConfigError, "disturbance time must lie in [0, duration)");
    if (scenario.saturation && !(scenario.saturation->low < scenario.saturation->high))
        throw Error(ErrorKind::InvalidArgument, "saturation requires low < high");

    const auto n = sample_count(cfg);
    const double dt = cfg.dt;
    FopdtPlant plant(model, dt, 0.0, cfg.initial_output);
    SimTrace trace{dt, 0.0, std::vector<double>(n, scenario.setpoint_step), {}, {}};
    trace.control.reserve(n);
    trace.output.reserve(n);

    // Backward-Euler discretization of td s / (tf s + 1).
    const double tf = gains.td / scenario.derivative_filter_n;
    const double d_keep = tf / (tf + dt);
    const double d_gain = gains.td / (tf + dt);

    double integral = 0.0;
    double derivative = 0.0;
    double prev_error = 0.0;
    double prev_output = cfg.initial_output;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = trace.time_at(k);
        const double y = plant.output();
        const double e = scenario.setpoint_step - y;

        integral += 0.5 * dt * (e + prev_error);
        const double change =
            scenario.derivative_mode == DerivativeMode::OnError ? e - prev_error : -(y - prev_output);
        derivative = d_keep * derivative + d_gain * change;

        double u = gains.kp * (e + integral / gains.ti + derivative);
        if (scenario.saturation) u = std::clamp(u, scenario.saturation->low, scenario.saturation->high);

        if (!std::isfinite(u) || !std::isfinite(y) || std::abs(u) > kRunawayMagnitude ||
            std::abs(y) > kRunawayMagnitude)
            throw DivergedError(t, fmt::format("closed loop diverged at t = {:.3f} s", t));

        trace.control.push_back(u);
        trace.output.push_back(y);
        prev_error = e;
        prev_output = y;

        const bool disturbed = scenario.disturbance_magnitude != 0.0 && t >= scenario.disturbance_time;
        plant.step(disturbed ? u + scenario.disturbance_magnitude : u);
    }
    return trace;
}

Metrics compute_metrics(const SimTrace& trace, double band_fraction,
                        std::optional<double> disturbance_time) {
    validate(trace);
    if (!(band_fraction > 0.0 && band_fraction < 1.0))
        throw Error(ErrorKind::InvalidArgument, "band fraction must lie in (0, 1)");

    const auto& y = trace.output;
    std::size_t split = y.size();
    if (disturbance_time) {
        const double steps = std::ceil((*disturbance_time - trace.t0) / trace.dt - 1e-9);
        split = static_cast<std::size_t>(std::clamp(steps, 0.0, static_cast<double>(y.size())));
    }
    if (split < 2)
        throw Error(ErrorKind::MetricsUndefined, "step segment shorter than two samples");

    Metrics m;
    m.initial_value = y.front();
    const std::size_t tail = std::max<std::size_t>(1, split / 10);
    double tail_sum = 0.0;
    for (std::size_t k = split - tail; k < split; ++k) tail_sum += y[k];
    m.final_value = tail_sum / static_cast<double>(tail);

    const double step = m.final_value - m.initial_value;
    const double scale = std::max({1.0, std::abs(m.initial_value), std::abs(m.final_value)});
    if (std::abs(step) <= 1e-12 * scale)
        throw Error(ErrorKind::MetricsUndefined, "step magnitude is zero; overshoot undefined");

    const auto seg_begin = y.begin();
    const auto seg_end = y.begin() + static_cast<std::ptrdiff_t>(split);
    m.peak_value = step > 0.0 ? *std::max_element(seg_begin, seg_end)
                              : *std::min_element(seg_begin, seg_end);
    m.overshoot_percent = std::max(0.0, 100.0 * (m.peak_value - m.final_value) / step);

    const double band = band_fraction * std::abs(step);
    auto last_outside = [&](std::size_t from, std::size_t to) -> std::optional<std::size_t> {
        for (std::size_t k = to; k > from; --k)
            if (std::abs(y[k - 1] - m.final_value) > band) return k - 1;
        return std::nullopt;
    };

    if (auto idx = last_outside(0, split); !idx)
        m.settling_time = 0.0;
    else if (*idx + 1 < split)
        m.settling_time = trace.time_at(*idx) - trace.t0;

    if (disturbance_time && split < y.size()) {
        if (auto idx = last_outside(split, y.size()); !idx)
            m.recovery_time = 0.0;
        else if (*idx + 1 < y.size())
            m.recovery_time = std::max(0.0, trace.time_at(*idx) - *disturbance_time);
    }
    return m;
}

}  // namespace relaytune
