#include "relaytune/ident.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune {

namespace {

constexpr double kLowFraction = 0.283;
constexpr double kHighFraction = 0.632;
constexpr double kSettledSpread = 0.02;

double mean_of(std::span<const ResponseSample> samples, double ResponseSample::*field) {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.*field;
    return sum / static_cast<double>(samples.size());
}

// Time at which `fraction` of the normalized rise is first reached at or after `from`.
std::optional<double> crossing_time(std::span<const ResponseSample> samples, std::size_t from,
                                    double baseline, double delta_y, double fraction) {
    auto normalized = [&](std::size_t i) { return (samples[i].output - baseline) / delta_y; };
    for (std::size_t i = from; i < samples.size(); ++i) {
        const double r = normalized(i);
        if (r < fraction) continue;
        if (i == 0) return samples[0].time;
        const double r_prev = normalized(i - 1);
        if (r_prev >= fraction || r == r_prev) return samples[i].time;
        const double w = (fraction - r_prev) / (r - r_prev);
        return samples[i - 1].time + w * (samples[i].time - samples[i - 1].time);
    }
    return std::nullopt;
}

}  // namespace

void validate(const ResponseRecord& record) {
    const auto& s = record.samples;
    if (s.size() < kMinRecordSamples)
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("record '{}' has {} samples (need >= {})", record.source_label,
                                s.size(), kMinRecordSamples));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i].time) || !std::isfinite(s[i].input) || !std::isfinite(s[i].output))
            throw Error(ErrorKind::InvalidArgument,
                        fmt::format("record '{}' sample {} is not finite", record.source_label, i));
        if (i > 0 && !(s[i].time > s[i - 1].time))
            throw Error(ErrorKind::InvalidArgument,
                        fmt::format("record '{}' times not strictly increasing at sample {}",
                                    record.source_label, i));
    }
}

double interpolate(std::span<const double> times, std::span<const double> values, double t) {
    if (times.size() != values.size() || times.empty())
        throw Error(ErrorKind::InvalidArgument, "interpolate: mismatched or empty columns");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) -
                                             times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

ResponseRecord average_records(std::span<const ResponseRecord> records, double grid_dt) {
    if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to average");
    if (!(grid_dt > 0.0) || !std::isfinite(grid_dt))
        throw Error(ErrorKind::InvalidArgument, "grid dt must be > 0");

    double start = -INFINITY;
    double end = INFINITY;
    for (const auto& r : records) {
        validate(r);
        start = std::max(start, r.samples.front().time);
        end = std::min(end, r.samples.back().time);
    }
    if (!(end > start))
        throw Error(ErrorKind::NoOverlap, "record time ranges do not overlap");

    const auto points = static_cast<std::size_t>(std::floor((end - start) / grid_dt + 1e-9)) + 1;
    if (points < kMinRecordSamples)
        throw Error(ErrorKind::NoOverlap,
                    fmt::format("overlap [{}, {}] yields only {} grid points", start, end, points));

    ResponseRecord out;
    out.source_label = records.size() == 1
                           ? records.front().source_label
                           : fmt::format("mean of {} records", records.size());
    out.samples.resize(points);
    for (std::size_t j = 0; j < points; ++j)
        out.samples[j] = {start + static_cast<double>(j) * grid_dt, 0.0, 0.0};

    std::vector<double> times, inputs, outputs;
    for (const auto& r : records) {
        times.clear();
        inputs.clear();
        outputs.clear();
        for (const auto& s : r.samples) {
            times.push_back(s.time);
            inputs.push_back(s.input);
            outputs.push_back(s.output);
        }
        for (auto& g : out.samples) {
            g.input += interpolate(times, inputs, g.time);
            g.output += interpolate(times, outputs, g.time);
        }
    }
    const auto count = static_cast<double>(records.size());
    for (auto& g : out.samples) {
        g.input /= count;
        g.output /= count;
    }
    return out;
}

double estimate_gain(double delta_y, double delta_u) {
    if (delta_u == 0.0 || !std::isfinite(delta_u) || !std::isfinite(delta_y))
        throw Error(ErrorKind::InvalidArgument, "input change must be finite and nonzero");
    return delta_y / delta_u;
}

FopdtModel identify_fopdt(const ResponseRecord& record) {
    validate(record);
    const auto& s = record.samples;

    std::size_t step_index = 0;
    double largest = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double change = std::abs(s[k].input - s[k - 1].input);
        if (change > largest) {
            largest = change;
            step_index = k;
        }
    }
    if (step_index == 0) throw Error(ErrorKind::NoStep, "input never changes");

    const std::span<const ResponseSample> all(s);
    const std::size_t tail = std::max<std::size_t>(1, s.size() / 10);
    const auto before = all.first(step_index);
    const auto final_part = all.last(tail);

    const double delta_u = mean_of(final_part, &ResponseSample::input) -
                           mean_of(before, &ResponseSample::input);
    if (std::abs(delta_u) <= 1e-12 * largest)
        throw Error(ErrorKind::NoStep, "input change is not sustained to the end of the record");

    const double baseline = mean_of(before, &ResponseSample::output);
    const double steady = mean_of(final_part, &ResponseSample::output);
    const double delta_y = steady - baseline;
    // Means of a constant signal can differ in the last bits; treat that as no response.
    if (std::abs(delta_y) <= 1e-9 * std::max({std::abs(baseline), std::abs(steady),
                                              std::numeric_limits<double>::min()}))
        throw Error(ErrorKind::InsufficientResponse, "output does not change after the step");

    const auto [lo, hi] = std::minmax_element(
        final_part.begin(), final_part.end(),
        [](const ResponseSample& a, const ResponseSample& b) { return a.output < b.output; });
    if (hi->output - lo->output >= kSettledSpread * std::abs(delta_y))
        throw Error(ErrorKind::InsufficientResponse,
                    "output has not settled over the final 10% of the record");

    const auto t_low = crossing_time(all, step_index, baseline, delta_y, kLowFraction);
    const auto t_high = crossing_time(all, step_index, baseline, delta_y, kHighFraction);
    if (!t_low || !t_high)
        throw Error(ErrorKind::InsufficientResponse,
                    "response never reaches the 28.3% / 63.2% thresholds");

    const double tau = 1.5 * (*t_high - *t_low);
    if (!(tau > 0.0))
        throw Error(ErrorKind::IllConditioned,
                    fmt::format("non-positive time constant ({}) from crossing times", tau));
    const double step_time = s[step_index].time;
    return {estimate_gain(delta_y, delta_u), tau, std::max(0.0, *t_high - tau - step_time)};
}

ResponseRecord record_from_trace(const SimTrace& trace, std::string label) {
    validate(trace);
    ResponseRecord record;
    record.source_label = std::move(label);
    record.samples.reserve(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        record.samples.push_back({trace.time_at(k), trace.control[k], trace.output[k]});
    return record;
}

}  // namespace relaytune
