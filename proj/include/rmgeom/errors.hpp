#pragma once

#include <stdexcept>
#include <string>

namespace rmgeom {

// Bad caller input: malformed field, lattice, form or argument outside the
// declared domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Not enough working precision to certify the requested digits.
class PrecisionExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A truncated series cannot meet the requested accuracy with the terms
// available (coefficient count, window size, ...).
class InsufficientTerms : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal invariant failed. Always a bug or a broken precondition that
// slipped through validation.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace rmgeom
