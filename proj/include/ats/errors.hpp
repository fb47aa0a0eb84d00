#pragma once

#include <stdexcept>
#include <string>

namespace ats {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. negative
// transform variable, non-positive step count).
struct DomainError : Error {
    using Error::Error;
};

// Model violates an admissibility condition, or an operation was asked of a
// model kind that does not support it.
struct ModelError : Error {
    using Error::Error;
};

// Adaptive integrator could not continue; carries the abscissa it failed at.
struct SolverError : Error {
    double at;
    SolverError(const std::string& what, double at_) : Error(what), at(at_) {}
};

// Evaluation point outside a tabulated grid.
struct RangeError : Error {
    using Error::Error;
};

// Evaluation time not present on an ensemble's stored grid, or incompatible
// grids passed to an operation.
struct GridError : Error {
    using Error::Error;
};

// Malformed configuration / JSON document.
struct SchemaError : Error {
    using Error::Error;
};

}  // namespace ats
