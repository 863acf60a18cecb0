/**
 * @file commands.hpp
 * @brief In-process implementations of the relay-tune subcommands.
 *
 * Each command returns a RunReport and writes its files under `out_dir`.
 * Failures are thrown as relaytune::Error; exit_code_for() maps them to the
 * process exit status.
 */

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "relaytune/circuit.hpp"
#include "relaytune/cli/pipeline.hpp"
#include "relaytune/error.hpp"
#include "relaytune/sim.hpp"

namespace relaytune::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitParse = 2,
    kExitIdentification = 3,
    kExitNoLimitCycle = 4,
    kExitDiverged = 5,
    kExitInfeasible = 6,
};

int exit_code_for(ErrorKind kind) noexcept;

struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs_echo;
    std::vector<std::pair<std::string, double>> results;
    std::vector<std::filesystem::path> trace_paths;
    std::vector<std::string> warnings;
    std::vector<std::string> summary;  ///< human-readable lines printed first

    void echo(std::string key, std::string value);
    /// Throws if `value` is not finite.
    void add_result(std::string key, double value);
    std::optional<double> result(const std::string& key) const;

    void print(std::ostream& out) const;
};

struct IdentifyOptions {
    std::vector<std::filesystem::path> inputs;
    double grid_dt = 0.01;
    std::filesystem::path out_dir = ".";
};

struct TuneOptions {
    FopdtModel model;
    TuningMethod method = TuningMethod::Kc;
    std::optional<double> pm_deg;
    double relay_d = 1.0;
    double hysteresis = 0.0;
    SimConfig cfg;
    std::filesystem::path out_dir = ".";
};

struct SimulateOptions {
    FopdtModel model;
    std::optional<PidGains> gains;  ///< when absent, tuned with `method`
    TuningMethod method = TuningMethod::Kc;
    std::optional<double> pm_deg;
    double relay_d = 1.0;
    LoopScenario scenario;
    double band = 0.05;
    SimConfig cfg;
    bool open_loop = false;   ///< drive the plant with a step of setpoint_step instead
    double step_time = 1.0;   ///< open-loop step instant [s]
    bool plot = false;
    std::filesystem::path out_dir = ".";
};

struct CompareOptions {
    FopdtModel model;
    double pm_kc = 50.0;
    double pm_kr = 70.0;
    double relay_d = 1.0;
    LoopScenario scenario;
    double band = 0.05;
    SimConfig cfg;
    bool plot = false;
    std::filesystem::path out_dir = ".";
};

enum class SynthesisMode { Exact, Paper };

struct CircuitOptions {
    std::optional<ParallelGains> parallel;
    std::optional<PidGains> pid;  ///< converted to parallel when `parallel` is absent
    double r3 = 1e3;
    double c1 = 220e-6;
    double c2 = 22e-6;
    SynthesisMode mode = SynthesisMode::Exact;
    ResistorSeries series = ResistorSeries::None;
};

/// Relative tolerance below which a circuit is reported as consistent.
inline constexpr double kCircuitTolerance = 1e-6;

RunReport cmd_identify(const IdentifyOptions& opts);
RunReport cmd_tune(const TuneOptions& opts);
RunReport cmd_simulate(const SimulateOptions& opts);
RunReport cmd_compare(const CompareOptions& opts);
RunReport cmd_circuit(const CircuitOptions& opts);

/// "G(s) = 0.322 e^(-1.3 s) / (1.33 s + 1)"
std::string transfer_function_string(const FopdtModel& model);

}  // namespace relaytune::cli
