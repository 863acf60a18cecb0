/**
 * @file circuit.hpp
 * @brief Analog op-amp PID: forward gains and component synthesis.
 *
 * Forward relations of the single-stage circuit:
 *   KI = R4 / (R3 R1 C2)
 *   KP = KI (R1 C1 + R2 C2)
 *   KD = KI R2 C1
 *
 * Two synthesis modes are offered. `synthesize_exact` inverts the relations
 * above. `synthesize_paper_mode` applies the closed forms
 *   R1 = KP / (2 KI C2),  R2 = KP / (2 KI C1),  R4 = KI R3 R1 C2
 * which do not invert the forward relations; its consistency report makes the
 * mismatch explicit.
 *
 * All values are SI base units (ohm, farad).
 */

#pragma once

#include <span>
#include <string_view>

#include "relaytune/model.hpp"

namespace relaytune {

struct CircuitDesign {
    double r1 = 0.0;
    double r2 = 0.0;  ///< zero realizes a PI controller
    double r3 = 0.0;
    double r4 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

void validate(const CircuitDesign& design);

/// Relative per-gain deviation of `achieved` from `target`. A zero target is
/// compared in absolute terms.
struct ConsistencyReport {
    ParallelGains target;
    ParallelGains achieved;
    double error_kp = 0.0;
    double error_ki = 0.0;
    double error_kd = 0.0;

    double worst() const noexcept;
    bool consistent(double tolerance = 1e-6) const noexcept;
};

ConsistencyReport compare_gains(const ParallelGains& target, const ParallelGains& achieved);

struct SynthesisResult {
    CircuitDesign design;
    ConsistencyReport report;  ///< circuit_gains(design) against the requested gains
};

ParallelGains circuit_gains(const CircuitDesign& design);

SynthesisResult synthesize_paper_mode(const ParallelGains& target, double r3, double c1,
                                      double c2);

/// Throws InfeasibleError (with the minimal C1) when KP C1 <= KD C2.
SynthesisResult synthesize_exact(const ParallelGains& target, double r3, double c1, double c2);

enum class ResistorSeries { None, E12, E24 };

std::span<const int> series_values(ResistorSeries series);

/// Nearest standard value in log distance; zero stays zero.
double snap_resistor(double ohms, ResistorSeries series);

/// Snaps R1..R4; the report compares the snapped circuit against the input design.
SynthesisResult snap_to_series(const CircuitDesign& design, ResistorSeries series);

ResistorSeries parse_series(std::string_view name);
std::string_view to_string(ResistorSeries series) noexcept;

}  // namespace relaytune
