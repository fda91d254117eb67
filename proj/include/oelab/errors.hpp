#pragma once

#include <stdexcept>
#include <string>

namespace oelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violates an operation's precondition (bad determinant, mixed bases, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Elements of different groups, or lattice vectors of different dimension.
class DimensionMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// A truncated object was asked for data outside the region on which it is exact.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// A bounded search or enumeration ran past its configured budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace oelab
