#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wmamp {

// Base of every library error. Physical errors (the signal cannot be
// recovered) and data errors (the caller supplied something malformed) are
// kept in separate branches so front ends can map them to distinct codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhysicalError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

// Post-selection exactly orthogonal to the no-signal state: the phase turns
// into a global phase.
struct ForbiddenDeltaError : PhysicalError {
    explicit ForbiddenDeltaError(const std::string& what, std::ptrdiff_t stage_index = -1)
        : PhysicalError(what), stage(stage_index) {}
    // 1-based stage that hit the forbidden point, -1 when not stage-specific.
    std::ptrdiff_t stage;
};

// One polarization component vanished (or the whole pointer did).
struct PhaseLostError : PhysicalError {
    using PhysicalError::PhysicalError;
};

// An amplification factor was requested for a zero signal.
struct DegenerateSignalError : PhysicalError {
    using PhysicalError::PhysicalError;
};

struct NormalizationError : DataError {
    using DataError::DataError;
};

struct DimensionError : DataError {
    using DataError::DataError;
};

struct DomainError : DataError {
    using DataError::DataError;
};

// Malformed configuration. `field` names the offending key when known.
struct ConfigError : DataError {
    explicit ConfigError(const std::string& what, std::string field_name = {})
        : DataError(what), field(std::move(field_name)) {}
    std::string field;
};

} // namespace wmamp
