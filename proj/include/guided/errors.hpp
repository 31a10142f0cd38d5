#pragma once

#include <stdexcept>
#include <string>

namespace guided {

/// Malformed input document (syntax or field types). The message carries the location.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Well-formed input that violates a structural invariant of the graph model.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure (non-Hermitian assembly, singular solve, failed convergence).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Valid input outside the domain of a specialised algorithm.
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace guided
