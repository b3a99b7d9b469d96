#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace czreg {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (nonpositive t, bad dimension, ...).
struct DomainError : Error {
    using Error::Error;
};

// Weight-grammar or file-format syntax error; carries the byte position.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

// Growth detected at the dilation search-grid boundary.
struct UnboundedDilationError : Error {
    using Error::Error;
};

// Numeric Boyd-index estimation did not converge.
struct IndexEstimationError : Error {
    using Error::Error;
};

// Indices are integer or straddle an integer; no fractional band exists.
struct NoBandError : Error {
    using Error::Error;
};

// Malformed sample file; carries the byte offset of the defect.
struct FormatError : Error {
    FormatError(const std::string& what, std::size_t off)
        : Error(what + " at offset " + std::to_string(off)), offset(off) {}
    std::size_t offset;
};

// Ball does not intersect the grid in enough points.
struct InsufficientSamplesError : Error {
    using Error::Error;
};

// Degenerate point configuration or rank-deficient design.
struct ConditioningError : Error {
    using Error::Error;
};

// Mollified derivatives diverge across the epsilon ladder.
struct ExtractionUnstableError : Error {
    using Error::Error;
};

// Jet field failed the Whitney compatibility gate.
struct CompatibilityError : Error {
    CompatibilityError(const std::string& what, double measured_constant)
        : Error(what), measured(measured_constant) {}
    double measured;
};

// Hypothesis side of an experiment fails broadly; the run is meaningless.
struct ExperimentInapplicableError : Error {
    using Error::Error;
};

}  // namespace czreg
