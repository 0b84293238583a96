#pragma once

#include <stdexcept>
#include <string>

namespace loclen {

/// Argument outside an operation's documented preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument is mathematically admissible but below the range where the
/// configured numerical method is trusted (e.g. t < min_t for theta).
class DomainRestriction : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computed quantity lost all meaning (non-finite mass, underflow).
class NumericDegeneracy : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An adaptive rule ran out of subdivisions. Carries the partial result.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial, double est_error)
        : std::runtime_error(what), partial_(partial), est_error_(est_error) {}

    double partial_value() const noexcept { return partial_; }
    double est_error() const noexcept { return est_error_; }

private:
    double partial_;
    double est_error_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace loclen
