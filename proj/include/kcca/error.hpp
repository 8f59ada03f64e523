#pragma once

#include <stdexcept>
#include <string>

namespace kcca {

/// Base class for all library errors. Carries the module and operation that
/// raised it so scripted callers can dispatch on structure instead of text.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string operation, const std::string& cause)
        : std::runtime_error(module + "::" + operation + ": " + cause),
          module_(std::move(module)),
          operation_(std::move(operation)),
          cause_(cause) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::string module_;
    std::string operation_;
    std::string cause_;
};

/// Malformed or out-of-contract input (dimension mismatch, bad CSV, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// Pipeline misuse, e.g. centering a Gram matrix twice.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Factorization failure, divergence, broken spectral invariants.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace kcca
