#include "relaytune/cli/app.hpp"

#include <algorithm>
#include <fstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "relaytune/cli/commands.hpp"
#include "relaytune/cli/units.hpp"

namespace relaytune::cli {

namespace {

struct KeyValue {
    std::string key;
    std::string value;
};

std::string trim_copy(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<KeyValue> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::vector<KeyValue> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_copy(line);
        if (line.empty() || line.front() == '#' || line.front() == ';' || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", fmt::format("{}:{}: expected key=value", path, line_no));
        auto key = trim_copy(line.substr(0, eq));
        if (key.starts_with("--")) key.erase(0, 2);
        entries.push_back({key, trim_copy(line.substr(eq + 1))});
    }
    return entries;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.starts_with(flag + "=");
    });
}

// Pulls `--config FILE` out of args and appends any key the command line does
// not already set, so explicit flags always win.
void apply_config_file(std::vector<std::string>& args, CLI::App& app) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return;

    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        for (auto* candidate : app.get_subcommands({}))
            if (candidate->get_name() == a) sub = candidate;
        if (sub) break;
    }
    if (!sub) return;
    for (const auto& [key, value] : read_key_values(path)) {
        const auto flag = "--" + key;
        if (sub->get_option_no_throw(flag) == nullptr) continue;
        if (!has_flag(args, flag)) args.push_back(flag + "=" + value);
    }
}

struct ModelFlags {
    FopdtModel model{};
    void attach(CLI::App* sub) {
        sub->add_option("--model-kp", model.gain_kp, "Plant gain K")->required();
        sub->add_option("--model-tau", model.tau, "Plant time constant [s]")->required();
        sub->add_option("--model-delay", model.dead_time, "Plant dead time [s]")->required();
    }
};

void attach_cfg(CLI::App* sub, SimConfig& cfg) {
    sub->add_option("--dt", cfg.dt, "Simulation step [s]")->capture_default_str();
    sub->add_option("--duration", cfg.duration, "Simulation horizon [s]")->capture_default_str();
}

struct ScenarioFlags {
    std::string derivative = "measurement";
    std::optional<double> sat_low;
    std::optional<double> sat_high;

    void attach(CLI::App* sub, LoopScenario& s, double& band) {
        sub->add_option("--setpoint", s.setpoint_step, "Set-point step applied at t = 0")
            ->capture_default_str();
        sub->add_option("--disturbance", s.disturbance_magnitude, "Input disturbance step")
            ->capture_default_str();
        sub->add_option("--disturbance-time", s.disturbance_time, "Disturbance instant [s]")
            ->capture_default_str();
        sub->add_option("--filter-n", s.derivative_filter_n, "Derivative filter N (lag Td/N)")
            ->capture_default_str();
        sub->add_option("--derivative", derivative, "Derivative acts on: measurement | error")
            ->check(CLI::IsMember({"measurement", "error"}))
            ->capture_default_str();
        sub->add_option("--sat-low", sat_low, "Control saturation lower bound");
        sub->add_option("--sat-high", sat_high, "Control saturation upper bound");
        sub->add_option("--band", band, "Settling band as a fraction of the step")
            ->capture_default_str();
    }

    void apply(LoopScenario& s) const {
        s.derivative_mode = derivative == "error" ? DerivativeMode::OnError : DerivativeMode::OnMeasurement;
        if (sat_low.has_value() != sat_high.has_value())
            throw CLI::ValidationError("--sat-low/--sat-high", "give both bounds or neither");
        if (sat_low) s.saturation = Saturation{*sat_low, *sat_high};
    }
};

double engineering_value(const std::string& text, const char* flag) {
    try {
        return parse_engineering(text);
    } catch (const Error& e) {
        throw CLI::ValidationError(flag, e.what());
    }
}

}  // namespace

int run_app(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relay-feedback PID tuning toolkit: identify, tune, simulate, compare, circuit",
                 "relay-tune"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "relay-tune 1.0.0");

    // identify
    IdentifyOptions identify;
    std::vector<std::string> identify_inputs;
    std::string identify_out = ".";
    auto* sub_identify = app.add_subcommand("identify", "Fit an FOPDT model to logged step responses");
    sub_identify->add_option("inputs", identify_inputs, "CSV files (time,input,output)")->required();
    sub_identify->add_option("--grid-dt", identify.grid_dt, "Resampling step when averaging [s]")
        ->capture_default_str();
    sub_identify->add_option("--out-dir", identify_out, "Output directory")->capture_default_str();

    // tune
    TuneOptions tune;
    ModelFlags tune_model;
    std::string tune_method = "kc";
    std::string tune_out = ".";
    auto* sub_tune = app.add_subcommand("tune", "Relay experiment and PID tuning rule");
    tune_model.attach(sub_tune);
    attach_cfg(sub_tune, tune.cfg);
    sub_tune->add_option("--method", tune_method, "ah | kc | kr")
        ->check(CLI::IsMember({"ah", "kc", "kr"}))
        ->capture_default_str();
    sub_tune->add_option("--pm", tune.pm_deg, "Phase margin [deg] (kc: 50, kr: 70)");
    sub_tune->add_option("--relay-d", tune.relay_d, "Relay magnitude")->capture_default_str();
    sub_tune->add_option("--hysteresis", tune.hysteresis, "Relay hysteresis")->capture_default_str();
    sub_tune->add_option("--out-dir", tune_out, "Output directory")->capture_default_str();

    // simulate
    SimulateOptions sim;
    ModelFlags sim_model;
    ScenarioFlags sim_flags;
    std::string sim_method = "kc";
    std::optional<double> sim_kp, sim_ti, sim_td;
    std::string sim_out = ".";
    auto* sub_sim = app.add_subcommand("simulate", "Closed-loop PID simulation with disturbance");
    sim_model.attach(sub_sim);
    attach_cfg(sub_sim, sim.cfg);
    sim_flags.attach(sub_sim, sim.scenario, sim.band);
    sub_sim->add_option("--kp", sim_kp, "Proportional gain");
    sub_sim->add_option("--ti", sim_ti, "Integral time [s]");
    sub_sim->add_option("--td", sim_td, "Derivative time [s]");
    sub_sim->add_option("--method", sim_method, "Tune with ah | kc | kr when no gains given")
        ->check(CLI::IsMember({"ah", "kc", "kr"}))
        ->capture_default_str();
    sub_sim->add_option("--pm", sim.pm_deg, "Phase margin [deg] for --method");
    sub_sim->add_option("--relay-d", sim.relay_d, "Relay magnitude for --method")->capture_default_str();
    sub_sim->add_flag("--open-loop", sim.open_loop, "Open-loop step of --setpoint instead of PID");
    sub_sim->add_option("--step-time", sim.step_time, "Open-loop step instant [s]")->capture_default_str();
    sub_sim->add_flag("--plot", sim.plot, "Also write an SVG chart");
    sub_sim->add_option("--out-dir", sim_out, "Output directory")->capture_default_str();

    // compare
    CompareOptions cmp;
    ModelFlags cmp_model;
    ScenarioFlags cmp_flags;
    std::string cmp_out = ".";
    auto* sub_cmp = app.add_subcommand("compare", "Tune and simulate AH, KC and KR side by side");
    cmp_model.attach(sub_cmp);
    attach_cfg(sub_cmp, cmp.cfg);
    cmp_flags.attach(sub_cmp, cmp.scenario, cmp.band);
    sub_cmp->add_option("--pm-kc", cmp.pm_kc, "KC phase margin [deg]")->capture_default_str();
    sub_cmp->add_option("--pm-kr", cmp.pm_kr, "KR phase margin [deg]")->capture_default_str();
    sub_cmp->add_option("--relay-d", cmp.relay_d, "Relay magnitude")->capture_default_str();
    sub_cmp->add_flag("--plot", cmp.plot, "Also write an overlaid SVG chart");
    sub_cmp->add_option("--out-dir", cmp_out, "Output directory")->capture_default_str();

    // circuit
    CircuitOptions circuit;
    std::optional<double> c_kp, c_ki, c_kd, c_ti, c_td;
    std::string c_r3 = "1k", c_c1 = "220u", c_c2 = "22u", c_mode = "exact", c_series = "none";
    auto* sub_circuit = app.add_subcommand("circuit", "Op-amp PID component synthesis");
    sub_circuit->add_option("--kp", c_kp, "Proportional gain")->required();
    sub_circuit->add_option("--ki", c_ki, "Parallel integral gain [1/s]");
    sub_circuit->add_option("--kd", c_kd, "Parallel derivative gain [s]");
    sub_circuit->add_option("--ti", c_ti, "Integral time [s] (converted to KI)");
    sub_circuit->add_option("--td", c_td, "Derivative time [s] (converted to KD)");
    sub_circuit->add_option("--r3", c_r3, "R3 (e.g. 1k)")->capture_default_str();
    sub_circuit->add_option("--c1", c_c1, "C1 (e.g. 220u)")->capture_default_str();
    sub_circuit->add_option("--c2", c_c2, "C2 (e.g. 22u)")->capture_default_str();
    sub_circuit->add_option("--mode", c_mode, "exact | paper")
        ->check(CLI::IsMember({"exact", "paper"}))
        ->capture_default_str();
    sub_circuit->add_option("--series", c_series, "none | e12 | e24")
        ->check(CLI::IsMember({"none", "e12", "e24"}))
        ->capture_default_str();

    try {
        apply_config_file(args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        RunReport report;
        if (sub_identify->parsed()) {
            for (const auto& p : identify_inputs) identify.inputs.emplace_back(p);
            identify.out_dir = identify_out;
            report = cmd_identify(identify);
        } else if (sub_tune->parsed()) {
            tune.model = tune_model.model;
            tune.method = parse_method(tune_method);
            tune.out_dir = tune_out;
            report = cmd_tune(tune);
        } else if (sub_sim->parsed()) {
            sim.model = sim_model.model;
            sim.method = parse_method(sim_method);
            sim_flags.apply(sim.scenario);
            const int given = sim_kp.has_value() + sim_ti.has_value() + sim_td.has_value();
            if (given != 0 && given != 3)
                throw CLI::ValidationError("--kp/--ti/--td", "give all three gains or none");
            if (given == 3) sim.gains = PidGains{*sim_kp, *sim_ti, *sim_td};
            sim.out_dir = sim_out;
            report = cmd_simulate(sim);
        } else if (sub_cmp->parsed()) {
            cmp.model = cmp_model.model;
            cmp_flags.apply(cmp.scenario);
            cmp.out_dir = cmp_out;
            report = cmd_compare(cmp);
        } else if (sub_circuit->parsed()) {
            if (c_ki) {
                circuit.parallel = ParallelGains{*c_kp, *c_ki, c_kd.value_or(0.0)};
            } else if (c_ti) {
                circuit.pid = PidGains{*c_kp, *c_ti, c_td.value_or(0.0)};
            } else {
                throw CLI::ValidationError("--ki/--ti", "give --ki (parallel) or --ti (PID form)");
            }
            circuit.r3 = engineering_value(c_r3, "--r3");
            circuit.c1 = engineering_value(c_c1, "--c1");
            circuit.c2 = engineering_value(c_c2, "--c2");
            circuit.mode = c_mode == "paper" ? SynthesisMode::Paper : SynthesisMode::Exact;
            circuit.series = parse_series(c_series);
            report = cmd_circuit(circuit);
        }
        report.print(out);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "error: Infeasible: " << e.what() << '\n'
            << fmt::format("suggested minimal C1: {}\n", format_engineering(e.min_c1(), "F"));
        return kExitInfeasible;
    } catch (const DivergedError& e) {
        err << "error: Diverged: " << e.what() << fmt::format(" (t = {:.3f} s)\n", e.time());
        return kExitDiverged;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace relaytune::cli
