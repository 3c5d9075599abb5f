#pragma once

#include <stdexcept>
#include <string>

namespace fprna {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate or parameter violates its positivity/ordering constraints.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a density or weight function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested moment does not exist for the given shape parameter.
class MomentDivergence : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature did not settle before the maximal order.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double previous, double last)
        : Error(what), previous_(previous), last_(last) {}

    double previous() const noexcept { return previous_; }
    double last() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

/// Moments that cannot come from a nonnegative measure (m1^2 > m0 m2).
class NumericalInconsistency : public Error {
public:
    using Error::Error;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NonnegativityViolation : public Error {
public:
    using Error::Error;
};

class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

/// A simulated trajectory left the finite range.
class BlowUp : public Error {
public:
    using Error::Error;
};

class EmptySample : public Error {
public:
    using Error::Error;
};

}  // namespace fprna
