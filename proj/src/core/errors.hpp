#pragma once

#include <stdexcept>
#include <string>

namespace gtherm {

// Error taxonomy shared by the C++ core, the C API status codes, and the
// CLI exit codes. Every failure carries the pipeline stage that raised it
// so the CLI can emit a single machine-parseable error line.

class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& msg)
        : std::runtime_error(msg), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

// Bad input files, unknown keys, malformed maps, shape mismatches.
class ConfigError : public Error {
    using Error::Error;
};

// Iterative solver exceeded its budget; message reports the last residual.
class ConvergenceError : public Error {
    using Error::Error;
};

// Closed-form denominator collapsed: leakage feedback gain reached unity.
class RunawayError : public Error {
    using Error::Error;
};

// Calibration fit failed its quality gate (r^2, residual, time constants).
class CalibrationError : public Error {
    using Error::Error;
};

// Result violated a physical validity bound (NaN, large negative rise).
class ValidationError : public Error {
    using Error::Error;
};

} // namespace gtherm
