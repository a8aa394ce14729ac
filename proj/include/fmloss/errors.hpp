#pragma once

#include <stdexcept>

namespace fmloss {

// Mismatched grid shapes; message names both shapes.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Out-of-range hyperparameter, config field, or misuse of an operation.
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unreadable input file; message carries file and line.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The mask generator could not hit the requested foreground ratio.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss or parameter during training; message names the epoch.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fmloss
