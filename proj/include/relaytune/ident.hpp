/**
 * @file ident.hpp
 * @brief FOPDT identification from logged step responses (two-point method).
 *
 * With dy the settled output change and t28, t63 the times at which the
 * normalized response crosses 28.3% and 63.2% after the step:
 *   K = dy / du,  tau = 1.5 (t63 - t28),  theta = max(0, t63 - tau - t_step)
 */

#pragma once

#include <span>
#include <string>
#include <vector>

#include "relaytune/model.hpp"

namespace relaytune {

struct ResponseSample {
    double time;
    double input;
    double output;
};

struct ResponseRecord {
    std::vector<ResponseSample> samples;
    std::string source_label;
};

inline constexpr std::size_t kMinRecordSamples = 10;

/// Times strictly increasing, all values finite, at least kMinRecordSamples.
void validate(const ResponseRecord& record);

/// Interpolates every record onto a common uniform grid over the intersection
/// of their time ranges and averages input and output pointwise.
ResponseRecord average_records(std::span<const ResponseRecord> records, double grid_dt);

double estimate_gain(double delta_y, double delta_u);

/// Linear interpolation of (time, value) samples at `t`; `t` must lie within range.
double interpolate(std::span<const double> times, std::span<const double> values, double t);

FopdtModel identify_fopdt(const ResponseRecord& record);

/// Converts a sampled trace (control as the input column) into a record.
ResponseRecord record_from_trace(const SimTrace& trace, std::string label = {});

}  // namespace relaytune
