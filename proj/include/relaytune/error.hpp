#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relaytune {

enum class ErrorKind {
    InvalidArgument,
    InvalidModel,
    InvalidGains,
    ConfigError,
    NoLimitCycle,
    Diverged,
    MetricsUndefined,
    NoOverlap,
    NoStep,
    InsufficientResponse,
    IllConditioned,
    InvalidPhaseMargin,
    InvalidTarget,
    Infeasible,
    ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base error for every failure raised by the toolkit. `kind()` identifies the
/// failure class; the message carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Closed-loop simulation produced a non-finite or runaway state.
class DivergedError : public Error {
public:
    DivergedError(double time, const std::string& message)
        : Error(ErrorKind::Diverged, message), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Exact circuit synthesis needs a larger C1; `min_c1()` is the boundary value.
class InfeasibleError : public Error {
public:
    InfeasibleError(double min_c1, const std::string& message)
        : Error(ErrorKind::Infeasible, message), min_c1_(min_c1) {}

    double min_c1() const noexcept { return min_c1_; }

private:
    double min_c1_;
};

/// CSV or numeric-literal parse failure. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(ErrorKind::ParseError, message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace relaytune
