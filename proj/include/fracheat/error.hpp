#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

// Base of every error the library throws. Callers that only care about
// "did the solve work" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid sizes: grids too small, k_max too large, n_t == 0, ...
class SizingError : public Error {
public:
    using Error::Error;
};

// A scalar parameter outside its admissible range (s, omega, T, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

// Malformed scenario configuration. `field` is a JSON-pointer-like path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Iterative or adaptive numerics that did not reach the requested accuracy.
class SolverError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public SolverError {
public:
    using SolverError::SolverError;
};

// Explicit Euler step too large for the operator.
class CflError : public Error {
public:
    CflError(const std::string& what, int admissible_n_t)
        : Error(what), admissible_n_t_(admissible_n_t) {}
    int admissible_n_t() const noexcept { return admissible_n_t_; }

private:
    int admissible_n_t_;
};

// Minimal-time bracket whose ends do not straddle the feasibility boundary.
class BracketError : public SolverError {
public:
    using SolverError::SolverError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fracheat
