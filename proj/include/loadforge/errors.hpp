#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace loadforge {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller handed in data that violates a documented precondition.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Text input that does not match its declared format.
class ParseError : public InvalidInput {
public:
    ParseError(const std::string& what, std::size_t line)
        : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Power series whose timestamps are not uniformly spaced.
class GapError : public InvalidInput {
public:
    GapError(const std::string& what, double timestamp)
        : InvalidInput(what), timestamp_(timestamp) {}

    double timestamp() const noexcept { return timestamp_; }

private:
    double timestamp_;
};

/// Base for failures of a numerical routine on valid input.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap; carries the best iterate seen.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd best)
        : NumericalError(what), best_(std::move(best)) {}

    const Eigen::VectorXd& best_iterate() const noexcept { return best_; }

private:
    Eigen::VectorXd best_;
};

/// The activation Gram matrix could not be inverted even after ridge rescue.
class DegenerateActivations : public NumericalError {
public:
    DegenerateActivations(const std::string& what, Eigen::Index component)
        : NumericalError(what), component_(component) {}

    Eigen::Index component() const noexcept { return component_; }

private:
    Eigen::Index component_;
};

/// A signature cannot be rescaled to unit power against the mains voltage.
class NormalizationError : public NumericalError {
public:
    NormalizationError(const std::string& what, Eigen::Index component)
        : NumericalError(what), component_(component) {}

    Eigen::Index component() const noexcept { return component_; }

private:
    Eigen::Index component_;
};

}  // namespace loadforge
