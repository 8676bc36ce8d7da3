#pragma once

#include <stdexcept>
#include <string>

namespace entropy {

/// Node level would exceed the addressable depth (index must fit 64 bits).
class DepthLimitError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Exhaustive construction refused because it would exceed its size budget.
class BudgetError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Adaptive quadrature did not reach its tolerance within the subdivision limit.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : std::runtime_error(what), estimate_(estimate), error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// A proved inequality failed; this always means an implementation bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace entropy
