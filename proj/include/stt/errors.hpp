#pragma once

#include <stdexcept>
#include <string>

namespace stt {

// Base class for all errors thrown by this library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Tensor/matrix dimension mismatch.
class shape_error : public error {
  public:
    using error::error;
};

// Coordinate outside the declared shape. `mode` is the offending mode (1-based).
class bounds_error : public error {
  public:
    bounds_error(const std::string& msg, int mode) : error(msg), mode(mode) {}
    int mode;
};

// Invalid scalar value (non-finite input, division guard, ...).
class value_error : public error {
  public:
    using error::error;
};

// Requested rank exceeds what the operand can provide.
class rank_error : public error {
  public:
    using error::error;
};

// Iterative method failed to reach its tolerance. Carries the last residual.
class convergence_error : public error {
  public:
    convergence_error(const std::string& msg, double residual)
        : error(msg), residual(residual) {}
    double residual;
};

// Non-finite quantity produced mid-computation. Carries the sweep index.
class numerical_error : public error {
  public:
    numerical_error(const std::string& msg, int iteration)
        : error(msg), iteration(iteration) {}
    int iteration;
};

// Malformed text input. `line` is the 1-based line number.
class parse_error : public error {
  public:
    parse_error(const std::string& msg, long line) : error(msg), line(line) {}
    long line;
};

// Structurally invalid file (bad magic number, header inconsistency, ...).
class format_error : public error {
  public:
    using error::error;
};

// Invalid generator specification.
class spec_error : public error {
  public:
    using error::error;
};

// Filesystem failure (missing file, unwritable path).
class io_error : public error {
  public:
    using error::error;
};

} // namespace stt
