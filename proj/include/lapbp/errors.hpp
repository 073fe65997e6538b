#pragma once

#include <stdexcept>
#include <string>

#include "lapbp/types.hpp"

namespace lapbp {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Stable class-style name, used by the CLI to label diagnostics.
    virtual const char* name() const noexcept { return "Error"; }
};

/// Shapes of A, b, s, or x are inconsistent with each other.
class DimensionMismatch : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "DimensionMismatch"; }
};

/// A does not have full row rank at the requested tolerance.
class RankDeficient : public Error {
public:
    RankDeficient(const std::string& what, Index estimated_rank)
        : Error(what), estimated_rank(estimated_rank) {}
    const char* name() const noexcept override { return "RankDeficient"; }
    Index estimated_rank;
};

/// An input contains NaN or infinity.
class NonFinite : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "NonFinite"; }
};

/// The graph passed to the incidence builder is not connected.
class DisconnectedGraph : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "DisconnectedGraph"; }
};

/// An edge endpoint or the grounded node is out of range (or a self-loop).
class InvalidNodeIndex : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "InvalidNodeIndex"; }
};

/// Requested sparsity density is outside (0, 1].
class InvalidDensity : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "InvalidDensity"; }
};

/// A weight vector entry is zero, negative, or non-finite.
class NonPositiveWeight : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "NonPositiveWeight"; }
};

/// The weighted Gram matrix is too ill-conditioned to solve reliably.
class IllConditioned : public Error {
public:
    IllConditioned(const std::string& what, double estimate)
        : Error(what), estimate(estimate) {}
    const char* name() const noexcept override { return "IllConditioned"; }
    double estimate; ///< estimated condition number
};

/// The iterative linear solver did not reach the requested residual.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    const char* name() const noexcept override { return "NoConvergence"; }
    double residual; ///< relative residual at the last iterate
};

/// A dense operation was requested beyond its supported size.
class SizeLimitExceeded : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "SizeLimitExceeded"; }
};

/// Accuracy parameter eps is outside (0, 1).
class InvalidEps : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "InvalidEps"; }
};

/// An argument that must be strictly positive is not.
class NonPositiveInput : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "NonPositiveInput"; }
};

/// A vector that must be zero-free has a zero entry.
class ZeroEntry : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "ZeroEntry"; }
};

/// A multiplicative update would overflow (exponent out of range).
class OverflowError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "OverflowError"; }
};

/// The exhaustive oracle was asked for a problem beyond its size limit.
class TooLarge : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "TooLarge"; }
};

/// No feasible solution exists (defensive; validated instances are feasible).
class Infeasible : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "Infeasible"; }
};

/// A finite-difference step is too large for the evaluation point.
class StepTooLarge : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "StepTooLarge"; }
};

/// An input file could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "ParseError"; }
};

} // namespace lapbp
