#pragma once

#include <stdexcept>
#include <string>

namespace drinfeld {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A mathematical precondition was violated (division by zero, non-Eisenstein
/// input, evaluation outside the convergence region, ...).
struct domain_error : error {
    using error::error;
};

/// The caller mixed incompatible objects (different coefficient fields,
/// element of a field that is not a sub-tower, ...).
struct usage_error : error {
    using error::error;
};

/// The requested result cannot be certified at the available precision.
/// Deciding it would require redoing the computation with more digits.
struct insufficient_precision : error {
    using error::error;
};

/// An identity that must hold by construction failed beyond precision slack;
/// signals a bug or a silently wrong input rather than a user mistake.
struct internal_inconsistency : error {
    using error::error;
};

} // namespace drinfeld
