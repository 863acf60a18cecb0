#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "relaytune/ident.hpp"
#include "relaytune/model.hpp"

namespace relaytune::cli {

inline constexpr const char* kRecordHeader = "time,input,output";
inline constexpr const char* kTraceHeader = "time,setpoint,control,output";

/// Parses a `time,input,output` log, or a `time,setpoint,control,output`
/// trace export (control becomes the input column). Throws ParseError with
/// the offending 1-based line number.
ResponseRecord parse_record_csv(std::istream& in, const std::string& label);
ResponseRecord read_record_csv(const std::filesystem::path& path);

/// Parses a trace export back into a SimTrace. The grid must be uniform.
SimTrace parse_trace_csv(std::istream& in);

/// Fixed six-decimal formatting; identical input gives identical bytes.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
void write_record_csv(std::ostream& out, const ResponseRecord& record);

std::string format_fixed6(double value);

}  // namespace relaytune::cli
