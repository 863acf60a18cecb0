#include "relaytune/cli/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

std::vector<double> parse_row(std::string_view line, std::size_t columns, std::size_t line_no) {
    std::vector<double> values;
    values.reserve(columns);
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        const auto field = trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        double v = 0.0;
        const auto* first = field.data();
        const auto* last = field.data() + field.size();
        if (!field.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
            throw ParseError(line_no, fmt::format("line {}: bad number '{}'", line_no, field));
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (values.size() != columns)
        throw ParseError(line_no, fmt::format("line {}: expected {} fields, got {}", line_no,
                                              columns, values.size()));
    return values;
}

struct Table {
    bool is_trace = false;
    std::vector<std::vector<double>> rows;
};

Table parse_table(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    Table table;

    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = trim(line);
        if (line_no == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
        if (text.empty()) continue;
        if (!have_header) {
            if (text == kRecordHeader)
                table.is_trace = false;
            else if (text == kTraceHeader)
                table.is_trace = true;
            else
                throw ParseError(line_no, fmt::format("line {}: expected header '{}' or '{}'",
                                                      line_no, kRecordHeader, kTraceHeader));
            have_header = true;
            continue;
        }
        auto row = parse_row(text, table.is_trace ? 4 : 3, line_no);
        if (!table.rows.empty() && !(row[0] > table.rows.back()[0]))
            throw ParseError(line_no, fmt::format("line {}: time {} is not increasing", line_no, row[0]));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(std::max<std::size_t>(1, line_no), "empty file: no header line");
    if (table.rows.size() < kMinRecordSamples)
        throw ParseError(line_no, fmt::format("only {} data rows (need >= {})", table.rows.size(),
                                              kMinRecordSamples));
    return table;
}

}  // namespace

std::string format_fixed6(double value) {
    auto s = fmt::format("{:.6f}", value);
    if (s == "-0.000000") s.erase(0, 1);
    return s;
}

ResponseRecord parse_record_csv(std::istream& in, const std::string& label) {
    const auto table = parse_table(in);
    ResponseRecord record;
    record.source_label = label;
    record.samples.reserve(table.rows.size());
    for (const auto& r : table.rows)
        record.samples.push_back(table.is_trace ? ResponseSample{r[0], r[2], r[3]}
                                                : ResponseSample{r[0], r[1], r[2]});
    return record;
}

ResponseRecord read_record_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, fmt::format("cannot open '{}'", path.string()));
    try {
        return parse_record_csv(in, path.filename().string());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), fmt::format("{}: {}", path.string(), e.what()));
    }
}

SimTrace parse_trace_csv(std::istream& in) {
    const auto table = parse_table(in);
    if (!table.is_trace) throw ParseError(1, fmt::format("line 1: expected header '{}'", kTraceHeader));
    SimTrace trace;
    trace.t0 = table.rows.front()[0];
    trace.dt = table.rows[1][0] - table.rows[0][0];
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& r = table.rows[k];
        if (std::abs(r[0] - trace.time_at(k)) > 1e-6 + 1e-9 * std::abs(r[0]))
            throw ParseError(k + 2, fmt::format("line {}: time grid is not uniform", k + 2));
        trace.setpoint.push_back(r[1]);
        trace.control.push_back(r[2]);
        trace.output.push_back(r[3]);
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    validate(trace);
    out << kTraceHeader << '\n';
    for (std::size_t k = 0; k < trace.size(); ++k)
        out << format_fixed6(trace.time_at(k)) << ',' << format_fixed6(trace.setpoint[k]) << ','
            << format_fixed6(trace.control[k]) << ',' << format_fixed6(trace.output[k]) << '\n';
}

void write_record_csv(std::ostream& out, const ResponseRecord& record) {
    out << kRecordHeader << '\n';
    for (const auto& s : record.samples)
        out << format_fixed6(s.time) << ',' << format_fixed6(s.input) << ','
            << format_fixed6(s.output) << '\n';
}

}  // namespace relaytune::cli
