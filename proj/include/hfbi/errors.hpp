#pragma once

#include <stdexcept>

namespace hfbi {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: CSV syntax, bad header, unparsable fields.
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates a documented precondition
// or invariant (duplicate rows, out-of-range arguments, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Estimation failure: degenerate sample, or no truncation point passes
// the goodness-of-fit threshold.
struct FitError : Error {
    using Error::Error;
};

}  // namespace hfbi
