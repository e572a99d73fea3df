#pragma once

#include <stdexcept>
#include <string>

namespace texcls {

/// Base of every error raised by the library. Each kind maps onto a CLI exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int exit_code() const noexcept = 0;
};

/// Bad configuration: missing paths, unknown keys, malformed values.
class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Out-of-range numeric parameter passed to an operation.
class ParameterError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Invalid input data: undecodable images, non-finite features, degenerate splits.
class DataError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

/// Caller violated a precondition (dimension mismatch and similar).
class ContractError : public DataError {
public:
    using DataError::DataError;
};

/// An estimator could not produce a value (too few scales, undefined correlation, ...).
class NumericalError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

} // namespace texcls

namespace texcls {

/// Rethrows the in-flight exception as the same error kind with `prefix` prepended to
/// its message. Foreign exceptions become NumericalError. Call only inside a catch block.
[[noreturn]] void rethrow_with_context(const std::string& prefix);

} // namespace texcls
