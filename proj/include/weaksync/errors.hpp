#pragma once

#include <stdexcept>
#include <string>

namespace weaksync {

/// Bad user input: negative weights, malformed files, inconsistent dimensions.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant failed. Indicates a bug upstream, not bad input.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulation state left the finite range.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& msg, double time)
        : std::runtime_error(msg), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// A check was asked to run on data that fails its preconditions; the result
/// would be meaningless rather than wrong.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace weaksync
