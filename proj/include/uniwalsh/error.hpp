#pragma once

#include <stdexcept>
#include <string>

namespace uniwalsh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A grid is too coarse to represent the requested function exactly.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Two operands live on grids that cannot be reconciled by refinement.
class RankMismatch : public Error {
public:
    using Error::Error;
};

/// A builder exhausted its retry/rank budget; `what()` carries the best margins.
class ConstructionFailed : public Error {
public:
    using Error::Error;
};

/// A frequency would exceed the configured per-axis cap.
class FrequencyBudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Weight construction needs more blocks than were built.
class InsufficientDepth : public Error {
public:
    using Error::Error;
};

/// Greedy selection found no admissible catalog index within the built depth.
class TargetNotApproximable : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message names the location.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace uniwalsh
