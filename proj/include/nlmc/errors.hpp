#pragma once

#include <stdexcept>
#include <string>

namespace nlmc {

/// Bad sizes, indices, or geometry handed to a constructor or operation.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. `line()` is 1-based, 0 when the problem is not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A coefficient value that no contrast bin covers.
class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& what, double value)
        : std::runtime_error(what), value_(value) {}
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Linear solver breakdown or failure to reach the requested residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual = -1.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A constraint row without support on free dofs, or linearly dependent on others.
/// `row()` indexes the constraint block of the failing system.
class ConstraintDegeneracyError : public SolverError {
public:
    ConstraintDegeneracyError(const std::string& what, int row)
        : SolverError(what), row_(row) {}
    int row() const noexcept { return row_; }

private:
    int row_;
};

/// Relative error whose reference has zero norm.
class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace nlmc
