#pragma once

#include <stdexcept>
#include <string>

namespace fk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The vector being orthonormalized lies (numerically) in the span of the basis.
class SubspaceExhausted : public Error {
public:
    SubspaceExhausted() : Error("subspace exhausted: vector lies in the span of the basis") {}
};

/// Francis QR sweep did not converge within its iteration budget.
class EigFailed : public Error {
public:
    using Error::Error;
};

/// A Chebyshev value would leave the double range.
class RangeExceeded : public Error {
public:
    using Error::Error;
};

/// The Chebyshev recurrence hit a vanishing denominator (reference point on the focal segment).
class FilterDegenerate : public Error {
public:
    using Error::Error;
};

/// The wanted Ritz value is not separated from the unwanted ones.
class NoSeparation : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message carries the offending line number.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace fk
