#pragma once

#include <stdexcept>
#include <string>

namespace qtick {

// Base class for all toolkit errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition or domain violations: bad dimensions, non-unit axis,
// non-Hermitian input, and the like.
class validation_error : public error {
public:
    using error::error;
};

// Numerical failures: eigensolver non-convergence, a required eigenvalue
// missing from a spectrum.
class numeric_error : public error {
public:
    using error::error;
};

// Illegal state transitions (resolving an already resolved outcome, ...).
class state_error : public error {
public:
    using error::error;
};

// Malformed graph structure, e.g. edges referencing unknown node ids.
class structural_error : public error {
public:
    using error::error;
};

} // namespace qtick
