#include "relaytune/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <sstream>

#include <fmt/format.h>

#include "relaytune/cli/csv.hpp"
#include "relaytune/cli/plot.hpp"
#include "relaytune/cli/units.hpp"
#include "relaytune/ident.hpp"

namespace relaytune::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{:.6g}", v); }

fs::path prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    return dir;
}

template <typename Writer>
fs::path write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "write failed: " + path.string());
    return path;
}

void echo_model(RunReport& report, const FopdtModel& m) {
    report.echo("model-kp", num(m.gain_kp));
    report.echo("model-tau", num(m.tau));
    report.echo("model-delay", num(m.dead_time));
}

void echo_cfg(RunReport& report, const SimConfig& cfg) {
    report.echo("dt", num(cfg.dt));
    report.echo("duration", num(cfg.duration));
}

void echo_scenario(RunReport& report, const LoopScenario& s, double band) {
    report.echo("setpoint", num(s.setpoint_step));
    report.echo("disturbance", num(s.disturbance_magnitude));
    report.echo("disturbance-time", num(s.disturbance_time));
    report.echo("filter-n", num(s.derivative_filter_n));
    report.echo("derivative",
                s.derivative_mode == DerivativeMode::OnError ? "error" : "measurement");
    if (s.saturation) {
        report.echo("sat-low", num(s.saturation->low));
        report.echo("sat-high", num(s.saturation->high));
    }
    report.echo("band", num(band));
}

void add_gains(RunReport& report, const std::string& prefix, const PidGains& g) {
    report.add_result(prefix + "kp", g.kp);
    report.add_result(prefix + "ti", g.ti);
    report.add_result(prefix + "td", g.td);
    const auto p = to_parallel(g);
    report.add_result(prefix + "KP", p.kp);
    report.add_result(prefix + "KI", p.ki);
    report.add_result(prefix + "KD", p.kd);
}

void add_metrics(RunReport& report, const std::string& prefix, const Metrics& m) {
    report.add_result(prefix + "overshoot_percent", m.overshoot_percent);
    report.add_result(prefix + "peak", m.peak_value);
    report.add_result(prefix + "final_value", m.final_value);
    if (m.settling_time)
        report.add_result(prefix + "settling_time", *m.settling_time);
    else
        report.warnings.push_back(prefix + "settling_time: not reached");
}

std::string metric_text(const std::optional<double>& v) {
    return v ? fmt::format("{:.2f} s", *v) : std::string("not reached");
}

double pm_for(TuningMethod method, std::optional<double> pm) {
    return pm.value_or(default_phase_margin(method));
}

void describe_tuning(RunReport& report, const TuneOutcome& t, const std::string& prefix) {
    report.add_result(prefix + "relay_amplitude", t.relay.amplitude_a);
    report.add_result(prefix + "relay_period", t.relay.period_tc);
    report.add_result(prefix + "relay_kc", t.relay.critical_gain_kc);
    if (t.extra_delay) {
        report.add_result(prefix + "extra_delay", *t.extra_delay);
        report.add_result(prefix + "delayed_amplitude", t.delayed_relay->amplitude_a);
        report.add_result(prefix + "delayed_period", t.delayed_relay->period_tc);
        report.add_result(prefix + "delayed_kc", t.delayed_relay->critical_gain_kc);
    }
    report.add_result(prefix + "critical_kc", t.critical.kc);
    report.add_result(prefix + "critical_tc", t.critical.tc);
    add_gains(report, prefix, t.gains);
    for (const auto& w : t.warnings) report.warnings.push_back(w);
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ParseError: return kExitParse;
        case ErrorKind::NoStep:
        case ErrorKind::InsufficientResponse:
        case ErrorKind::IllConditioned:
        case ErrorKind::NoOverlap: return kExitIdentification;
        case ErrorKind::NoLimitCycle: return kExitNoLimitCycle;
        case ErrorKind::Diverged: return kExitDiverged;
        case ErrorKind::Infeasible: return kExitInfeasible;
        default: return kExitUsage;
    }
}

void RunReport::echo(std::string key, std::string value) {
    inputs_echo.emplace_back(std::move(key), std::move(value));
}

void RunReport::add_result(std::string key, double value) {
    if (!std::isfinite(value))
        throw Error(ErrorKind::InvalidArgument, fmt::format("result '{}' is not finite", key));
    results.emplace_back(std::move(key), value);
}

std::optional<double> RunReport::result(const std::string& key) const {
    for (const auto& [k, v] : results)
        if (k == key) return v;
    return std::nullopt;
}

void RunReport::print(std::ostream& out) const {
    out << "command: " << command << '\n';
    for (const auto& line : summary) out << line << '\n';
    for (const auto& [k, v] : inputs_echo) out << "input " << k << " = " << v << '\n';
    for (const auto& [k, v] : results) out << "result " << k << " = " << fmt::format("{:.6g}", v) << '\n';
    for (const auto& p : trace_paths) out << "trace " << p.string() << '\n';
    for (const auto& w : warnings) out << "warning: " << w << '\n';
}

std::string transfer_function_string(const FopdtModel& m) {
    return fmt::format("G(s) = {:.4g} e^(-{:.4g} s) / ({:.4g} s + 1)", m.gain_kp, m.dead_time, m.tau);
}

RunReport cmd_identify(const IdentifyOptions& opts) {
    RunReport report;
    report.command = "identify";
    if (opts.inputs.empty()) throw Error(ErrorKind::InvalidArgument, "no input CSV files given");
    for (const auto& p : opts.inputs) report.echo("input", p.string());
    report.echo("grid-dt", num(opts.grid_dt));

    std::vector<ResponseRecord> records;
    records.reserve(opts.inputs.size());
    for (const auto& p : opts.inputs) records.push_back(read_record_csv(p));

    const ResponseRecord record =
        records.size() == 1 ? records.front() : average_records(records, opts.grid_dt);
    const auto model = identify_fopdt(record);

    report.summary.push_back(transfer_function_string(model));
    report.add_result("records", static_cast<double>(records.size()));
    report.add_result("gain_kp", model.gain_kp);
    report.add_result("tau", model.tau);
    report.add_result("dead_time", model.dead_time);

    const auto dir = prepare_out_dir(opts.out_dir);
    report.trace_paths.push_back(write_file(
        dir / "identify_average.csv", [&](std::ostream& out) { write_record_csv(out, record); }));
    report.trace_paths.push_back(write_file(dir / "model.ini", [&](std::ostream& out) {
        out << "model-kp=" << fmt::format("{:.9g}", model.gain_kp) << '\n'
            << "model-tau=" << fmt::format("{:.9g}", model.tau) << '\n'
            << "model-delay=" << fmt::format("{:.9g}", model.dead_time) << '\n';
    }));
    return report;
}

RunReport cmd_tune(const TuneOptions& opts) {
    RunReport report;
    report.command = "tune";
    echo_model(report, opts.model);
    echo_cfg(report, opts.cfg);
    const double pm = pm_for(opts.method, opts.pm_deg);
    report.echo("method", std::string(to_string(opts.method)));
    if (opts.method != TuningMethod::Ah) report.echo("pm", num(pm));
    report.echo("relay-d", num(opts.relay_d));

    const auto outcome =
        run_tuning({opts.model, opts.method, pm, opts.relay_d, opts.hysteresis, opts.cfg});
    describe_tuning(report, outcome, "");
    const auto p = to_parallel(outcome.gains);
    report.summary.push_back(fmt::format("critical point: Kc = {:.4f}, Tc = {:.4f} s",
                                         outcome.critical.kc, outcome.critical.tc));
    report.summary.push_back(fmt::format("PID: Kp = {:.4f}, Ti = {:.4f} s, Td = {:.4f} s",
                                         outcome.gains.kp, outcome.gains.ti, outcome.gains.td));
    report.summary.push_back(
        fmt::format("parallel: KP = {:.4f}, KI = {:.4f} 1/s, KD = {:.4f} s", p.kp, p.ki, p.kd));

    const auto dir = prepare_out_dir(opts.out_dir);
    const auto name = std::string(to_string(opts.method));
    report.trace_paths.push_back(
        write_file(dir / fmt::format("relay_{}.csv", name),
                   [&](std::ostream& out) { write_trace_csv(out, outcome.relay_trace); }));
    if (outcome.delayed_trace)
        report.trace_paths.push_back(
            write_file(dir / fmt::format("relay_{}_delayed.csv", name),
                       [&](std::ostream& out) { write_trace_csv(out, *outcome.delayed_trace); }));
    return report;
}

RunReport cmd_simulate(const SimulateOptions& opts) {
    RunReport report;
    report.command = "simulate";
    echo_model(report, opts.model);
    echo_cfg(report, opts.cfg);
    echo_scenario(report, opts.scenario, opts.band);
    validate(opts.cfg, opts.model);

    SimTrace trace;
    std::optional<double> disturbance;
    if (opts.open_loop) {
        report.echo("open-loop", "true");
        report.echo("step-time", num(opts.step_time));
        std::vector<double> input(sample_count(opts.cfg), 0.0);
        for (std::size_t k = 0; k < input.size(); ++k)
            if (static_cast<double>(k) * opts.cfg.dt >= opts.step_time - 1e-12)
                input[k] = opts.scenario.setpoint_step;
        trace = simulate_open_loop(opts.model, input, opts.cfg);
        trace.setpoint = trace.control;
    } else {
        PidGains gains;
        if (opts.gains) {
            gains = *opts.gains;
        } else {
            const double pm = pm_for(opts.method, opts.pm_deg);
            report.echo("method", std::string(to_string(opts.method)));
            const auto tuned = run_tuning({opts.model, opts.method, pm, opts.relay_d, 0.0, opts.cfg});
            describe_tuning(report, tuned, "");
            gains = tuned.gains;
        }
        report.echo("kp", num(gains.kp));
        report.echo("ti", num(gains.ti));
        report.echo("td", num(gains.td));
        trace = simulate_closed_loop(opts.model, gains, opts.scenario, opts.cfg);
        if (opts.scenario.disturbance_magnitude != 0.0) disturbance = opts.scenario.disturbance_time;
    }

    const auto m = compute_metrics(trace, opts.band, disturbance);
    add_metrics(report, "", m);
    if (disturbance) {
        if (m.recovery_time)
            report.add_result("recovery_time", *m.recovery_time);
        else
            report.warnings.push_back("recovery_time: not reached");
    }
    report.summary.push_back(fmt::format("overshoot {:.2f}%, settling {}, recovery {}",
                                         m.overshoot_percent, metric_text(m.settling_time),
                                         disturbance ? metric_text(m.recovery_time) : "n/a"));

    const auto dir = prepare_out_dir(opts.out_dir);
    report.trace_paths.push_back(write_file(
        dir / "simulate.csv", [&](std::ostream& out) { write_trace_csv(out, trace); }));
    if (opts.plot) {
        std::vector<double> times(trace.size());
        for (std::size_t k = 0; k < times.size(); ++k) times[k] = trace.time_at(k);
        const std::vector<PlotSeries> series = {
            {"setpoint", trace.setpoint}, {"output", trace.output}, {"control", trace.control}};
        report.trace_paths.push_back(write_file(dir / "simulate.svg", [&](std::ostream& out) {
            write_svg_chart(out, opts.open_loop ? "Open-loop response" : "Closed-loop response",
                            times, series);
        }));
    }
    return report;
}

RunReport cmd_compare(const CompareOptions& opts) {
    RunReport report;
    report.command = "compare";
    echo_model(report, opts.model);
    echo_cfg(report, opts.cfg);
    echo_scenario(report, opts.scenario, opts.band);
    report.echo("pm-kc", num(opts.pm_kc));
    report.echo("pm-kr", num(opts.pm_kr));
    report.echo("relay-d", num(opts.relay_d));

    struct MethodRun {
        TuningMethod method;
        std::optional<TuneOutcome> tuning;
        std::optional<SimTrace> trace;
        std::optional<Metrics> metrics;
        std::exception_ptr error;
    };

    const std::optional<double> disturbance =
        opts.scenario.disturbance_magnitude != 0.0 ? std::optional(opts.scenario.disturbance_time)
                                                   : std::nullopt;
    auto run_one = [&](TuningMethod method) {
        MethodRun run{method, {}, {}, {}, {}};
        try {
            const double pm = method == TuningMethod::Kr ? opts.pm_kr : opts.pm_kc;
            run.tuning = run_tuning({opts.model, method, pm, opts.relay_d, 0.0, opts.cfg});
            run.trace = simulate_closed_loop(opts.model, run.tuning->gains, opts.scenario, opts.cfg);
            run.metrics = compute_metrics(*run.trace, opts.band, disturbance);
        } catch (...) {
            run.error = std::current_exception();
        }
        return run;
    };

    std::vector<std::future<MethodRun>> futures;
    for (auto method : {TuningMethod::Ah, TuningMethod::Kc, TuningMethod::Kr})
        futures.push_back(std::async(std::launch::async, run_one, method));
    std::vector<MethodRun> runs;
    for (auto& f : futures) runs.push_back(f.get());

    std::exception_ptr first_error;
    std::vector<const MethodRun*> ok;
    for (const auto& run : runs) {
        const auto name = std::string(to_string(run.method));
        if (run.error) {
            if (!first_error) first_error = run.error;
            try {
                std::rethrow_exception(run.error);
            } catch (const std::exception& e) {
                report.warnings.push_back(fmt::format("{} failed: {}", name, e.what()));
            }
            continue;
        }
        ok.push_back(&run);
    }
    if (ok.empty()) std::rethrow_exception(first_error);

    std::stable_sort(ok.begin(), ok.end(), [](const MethodRun* a, const MethodRun* b) {
        return a->metrics->overshoot_percent < b->metrics->overshoot_percent;
    });

    report.summary.push_back(fmt::format("{:<6} {:>8} {:>8} {:>8} {:>11} {:>12} {:>12}", "method",
                                         "kp", "ti", "td", "overshoot%", "settling", "recovery"));
    for (const auto* run : ok) {
        const auto name = std::string(to_string(run->method));
        const auto& g = run->tuning->gains;
        const auto& m = *run->metrics;
        report.summary.push_back(fmt::format("{:<6} {:>8.4f} {:>8.4f} {:>8.4f} {:>11.2f} {:>12} {:>12}",
                                             name, g.kp, g.ti, g.td, m.overshoot_percent,
                                             metric_text(m.settling_time),
                                             disturbance ? metric_text(m.recovery_time) : "n/a"));
        describe_tuning(report, *run->tuning, name + ".");
        add_metrics(report, name + ".", m);
        if (disturbance && m.recovery_time) report.add_result(name + ".recovery_time", *m.recovery_time);
    }
    report.summary.push_back(
        fmt::format("lowest overshoot: {}", to_string(ok.front()->method)));

    // Write only after every pipeline has finished.
    const auto dir = prepare_out_dir(opts.out_dir);
    std::vector<const MethodRun*> by_method = ok;
    std::sort(by_method.begin(), by_method.end(),
              [](const MethodRun* a, const MethodRun* b) { return a->method < b->method; });
    const SimTrace& base = *by_method.front()->trace;
    report.trace_paths.push_back(write_file(dir / "compare.csv", [&](std::ostream& out) {
        out << "time,setpoint";
        for (const auto* run : by_method) out << ",output_" << to_string(run->method);
        out << '\n';
        for (std::size_t k = 0; k < base.size(); ++k) {
            out << format_fixed6(base.time_at(k)) << ',' << format_fixed6(base.setpoint[k]);
            for (const auto* run : by_method) out << ',' << format_fixed6(run->trace->output[k]);
            out << '\n';
        }
    }));
    report.trace_paths.push_back(write_file(dir / "compare_metrics.csv", [&](std::ostream& out) {
        out << "method,kp,ti,td,overshoot_percent,settling_time,recovery_time\n";
        auto opt = [](const std::optional<double>& v) { return v ? format_fixed6(*v) : std::string(); };
        for (const auto* run : ok) {
            const auto& g = run->tuning->gains;
            const auto& m = *run->metrics;
            out << to_string(run->method) << ',' << format_fixed6(g.kp) << ',' << format_fixed6(g.ti)
                << ',' << format_fixed6(g.td) << ',' << format_fixed6(m.overshoot_percent) << ','
                << opt(m.settling_time) << ',' << opt(m.recovery_time) << '\n';
        }
    }));
    if (opts.plot) {
        std::vector<double> times(base.size());
        for (std::size_t k = 0; k < times.size(); ++k) times[k] = base.time_at(k);
        std::vector<PlotSeries> series = {{"setpoint", base.setpoint}};
        for (const auto* run : by_method) {
            std::string label(to_string(run->method));
            std::transform(label.begin(), label.end(), label.begin(), ::toupper);
            series.push_back({label, run->trace->output});
        }
        report.trace_paths.push_back(write_file(dir / "compare.svg", [&](std::ostream& out) {
            write_svg_chart(out, "PID tuning comparison", times, series);
        }));
    }
    return report;
}

RunReport cmd_circuit(const CircuitOptions& opts) {
    RunReport report;
    report.command = "circuit";
    ParallelGains target;
    if (opts.parallel) {
        target = *opts.parallel;
    } else if (opts.pid) {
        target = to_parallel(*opts.pid);
        report.echo("kp", num(opts.pid->kp));
        report.echo("ti", num(opts.pid->ti));
        report.echo("td", num(opts.pid->td));
    } else {
        throw Error(ErrorKind::InvalidArgument, "give --kp with --ki/--kd or with --ti/--td");
    }
    report.echo("KP", num(target.kp));
    report.echo("KI", num(target.ki));
    report.echo("KD", num(target.kd));
    report.echo("r3", format_engineering(opts.r3, "\xCE\xA9"));
    report.echo("c1", format_engineering(opts.c1, "F"));
    report.echo("c2", format_engineering(opts.c2, "F"));
    report.echo("mode", opts.mode == SynthesisMode::Paper ? "paper" : "exact");
    report.echo("series", std::string(to_string(opts.series)));

    const auto synth = opts.mode == SynthesisMode::Paper
                           ? synthesize_paper_mode(target, opts.r3, opts.c1, opts.c2)
                           : synthesize_exact(target, opts.r3, opts.c1, opts.c2);

    auto describe = [&](const std::string& heading, const CircuitDesign& d, const std::string& prefix) {
        const std::string ohm = "\xCE\xA9";
        report.summary.push_back(heading);
        report.summary.push_back(fmt::format("  R1 = {}  R2 = {}  R3 = {}  R4 = {}",
                                             format_engineering(d.r1, ohm), format_engineering(d.r2, ohm),
                                             format_engineering(d.r3, ohm), format_engineering(d.r4, ohm)));
        report.summary.push_back(fmt::format("  C1 = {}  C2 = {}", format_engineering(d.c1, "F"),
                                             format_engineering(d.c2, "F")));
        report.add_result(prefix + "r1", d.r1);
        report.add_result(prefix + "r2", d.r2);
        report.add_result(prefix + "r3", d.r3);
        report.add_result(prefix + "r4", d.r4);
    };
    auto describe_check = [&](const ConsistencyReport& c, const std::string& prefix,
                              const std::string& against) {
        report.summary.push_back(fmt::format(
            "  forward gains: KP = {:.4g} ({:+.3f}%), KI = {:.4g} ({:+.3f}%), KD = {:.4g} ({:+.3f}%) vs {}",
            c.achieved.kp, 100.0 * (c.achieved.kp - c.target.kp) / c.target.kp, c.achieved.ki,
            100.0 * (c.achieved.ki - c.target.ki) / c.target.ki, c.achieved.kd,
            c.target.kd == 0.0 ? 0.0 : 100.0 * (c.achieved.kd - c.target.kd) / c.target.kd, against));
        report.add_result(prefix + "KP", c.achieved.kp);
        report.add_result(prefix + "KI", c.achieved.ki);
        report.add_result(prefix + "KD", c.achieved.kd);
        report.add_result(prefix + "error_kp_percent", 100.0 * c.error_kp);
        report.add_result(prefix + "error_ki_percent", 100.0 * c.error_ki);
        report.add_result(prefix + "error_kd_percent", 100.0 * c.error_kd);
    };

    describe(opts.mode == SynthesisMode::Paper ? "paper-mode design:" : "exact design:", synth.design, "");
    describe_check(synth.report, "forward_", "target");
    if (synth.report.consistent(kCircuitTolerance))
        report.summary.push_back("  consistency: OK");
    else
        report.warnings.push_back(fmt::format(
            "forward-evaluated gains deviate from target (KP {:.4g} vs {:.4g}, worst error {:.1f}%)",
            synth.report.achieved.kp, target.kp, 100.0 * synth.report.worst()));

    if (opts.series != ResistorSeries::None) {
        const auto snapped = snap_to_series(synth.design, opts.series);
        describe(fmt::format("snapped to {}:", to_string(opts.series)), snapped.design, "snapped_");
        describe_check(compare_gains(target, snapped.report.achieved), "snapped_", "target");
    }
    return report;
}

}  // namespace relaytune::cli
