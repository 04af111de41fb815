#pragma once
#include <stdexcept>

namespace ethd {

// Bad arguments or protocol violations; the CLI maps these to exit code 2.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Divergence, degenerate data, nonconvergence; exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem and parsing failures; exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ethd
