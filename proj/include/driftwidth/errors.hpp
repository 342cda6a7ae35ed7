#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace driftwidth {

/// Invalid configuration or argument. The message always names the
/// offending field so callers can surface it verbatim.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed CSV input; `line` is 1-based (header is line 1).
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    explicit CsvError(const std::string& what) : std::runtime_error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Pearson correlation of a constant series is undefined. Raised instead
/// of silently returning 0 or NaN.
class UndefinedCorrelationError : public std::domain_error {
public:
    explicit UndefinedCorrelationError(const std::string& what) : std::domain_error(what) {}
};

/// A component failed mid-run; carries the timestep that was being
/// processed when the run aborted.
class PrequentialError : public std::runtime_error {
public:
    PrequentialError(std::int64_t t, const std::string& what)
        : std::runtime_error("t=" + std::to_string(t) + ": " + what), t_(t) {}

    std::int64_t t() const noexcept { return t_; }

private:
    std::int64_t t_;
};

}  // namespace driftwidth
