#pragma once

#include <stdexcept>
#include <string>

namespace gtd {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A probability vector does not sum to one (or has negative entries).
struct InvalidDistribution : Error {
    using Error::Error;
};

/// The behavior policy assigns zero probability to a sampled action.
struct BehaviorZero : Error {
    using Error::Error;
};

/// An iterative solver did not reach its tolerance within the iteration cap.
struct NotConverged : Error {
    using Error::Error;
};

/// A state, action, or index is outside its valid range.
struct OutOfRange : Error {
    using Error::Error;
};

/// The feature covariance matrix is singular where an inverse is required.
struct SingularC : Error {
    using Error::Error;
};

/// The A matrix is singular where an inverse is required.
struct SingularA : Error {
    using Error::Error;
};

/// Vector dimensions of an update do not agree.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// The step-size rule degenerated (M_* = 0).
struct ZeroMstar : Error {
    using Error::Error;
};

/// The off-policy performance bound requires the LMI condition to hold.
struct LmiViolated : Error {
    using Error::Error;
};

/// Battery action outside the feasible charge interval.
struct ActionOutOfBounds : Error {
    using Error::Error;
};

/// Battery grid admits no feasible action in some state.
struct GridInfeasible : Error {
    using Error::Error;
};

/// Filesystem failure while emitting artifacts.
struct IoError : Error {
    using Error::Error;
};

} // namespace gtd
