#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gupeq {

/// Short general-format rendering of a real for error messages.
inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed deformation expression. `position` is the 1-based byte position
/// of the offending character; one past the last byte means end of input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position, std::string expected)
        : Error(what), position_(position), expected_(std::move(expected)) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

/// Evaluation left the real domain (log of non-positive, 0^negative, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& what, double p) : Error(what), p_(p) {}
    [[nodiscard]] double p() const noexcept { return p_; }

private:
    double p_;
};

/// A candidate or a configuration was rejected before any numerics ran.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Candidate f is not bounded below by a positive number at `p`.
class PositivityError : public ValidationError {
public:
    PositivityError(const std::string& what, double p) : ValidationError(what), p_(p) {}
    [[nodiscard]] double p() const noexcept { return p_; }

private:
    double p_;
};

/// Operation called outside its documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature could not reach its tolerance on [a, b].
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double a, double b) : Error(what), a_(a), b_(b) {}
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }

private:
    double a_;
    double b_;
};

/// A convergence test reached its cap without a verdict.
class IndeterminateError : public Error {
public:
    using Error::Error;
};

/// Internal numerical failure: non-Hermitian input, solver breakdown, or a
/// closed-form consistency check that should never fail.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace gupeq
