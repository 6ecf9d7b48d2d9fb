#pragma once

#include <stdexcept>
#include <string>

namespace edgelab {

/// Process exit codes used by the CLI and the run harness.
enum class ExitCode : int {
    ok = 0,
    validation = 2,
    inconclusive = 3,
    numerical_contract = 4,
};

/// Base class for all errors raised by the library. Carries a
/// machine-readable reason ("mu_not_in_gap", ...) next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string reason, const std::string& message)
        : std::runtime_error(message), reason_(std::move(reason)) {}

    const std::string& reason() const noexcept { return reason_; }
    virtual ExitCode exit_code() const noexcept = 0;

private:
    std::string reason_;
};

/// Bad input: precondition on arguments, geometry or configuration.
class ValidationError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::validation; }
};

/// An index estimate that did not converge to an integer.
class InconclusiveError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::inconclusive; }
};

/// A numerical contract (Hermiticity, unitarity, projection, ...) was violated.
class NumericalContractError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::numerical_contract; }
};

} // namespace edgelab
