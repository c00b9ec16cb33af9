#pragma once

#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

namespace fdr {

// Domain violations (bad hardness, unknown type letter, zero load, ...)
// are reported with std::domain_error. The types below carry extra context.

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Fixed-point iteration failed; carries the last two gate-opening iterates.
class FixedPointError : public SolverError {
public:
    FixedPointError(const std::string& what, double previous, double last)
        : SolverError(what, std::abs(last - previous)), previous_(previous), last_(last) {}

    double previous_iterate() const noexcept { return previous_; }
    double last_iterate() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

/// A point of a sweep failed; carries the flow rate and nests the original
/// error (std::rethrow_if_nested recovers it).
class SweepPointError : public SolverError, public std::nested_exception {
public:
    SweepPointError(double q_in, const std::string& what, double last_residual)
        : SolverError(what, last_residual), q_in_(q_in) {}

    double q_in() const noexcept { return q_in_; }  // m^3/s

private:
    double q_in_;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdr
