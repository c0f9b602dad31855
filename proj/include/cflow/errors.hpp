#pragma once

#include <stdexcept>
#include <string>

namespace cflow {

/// Invalid input or configuration (CLI exit code 2).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public NumericalError {
public:
    StepSizeUnderflow(double t_reached, const std::string& what)
        : NumericalError(what), t_reached_(t_reached) {}
    double t_reached() const noexcept { return t_reached_; }

private:
    double t_reached_;
};

class NonFiniteState : public NumericalError {
public:
    NonFiniteState(double t_reached, const std::string& what)
        : NumericalError(what), t_reached_(t_reached) {}
    double t_reached() const noexcept { return t_reached_; }

private:
    double t_reached_;
};

/// Raised when a Newton iteration does not reach its tolerance.
class NoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The modulation Jacobian lost rank (p too close to zero for the mu-direction).
class DegenerateJacobian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cflow
