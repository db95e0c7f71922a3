#pragma once

#include <stdexcept>
#include <string>

namespace fpplab {

/// Input rejected before any computation ran (bad config, violated precondition).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rejection sampling accepted too few samples within its budget.
class RareConditioningError : public std::runtime_error {
public:
    RareConditioningError(const std::string& what, long accepted, long budget)
        : std::runtime_error(what), accepted_(accepted), budget_(budget) {}
    long accepted() const noexcept { return accepted_; }
    long budget() const noexcept { return budget_; }

private:
    long accepted_;
    long budget_;
};

/// The conditioning event {S_n <= L} has probability zero.
class EmptyConditioningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Common denominator times L exceeds the configured DP state cap.
class GridOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The tail rule has no closed-form summability analysis.
class UndecidableTailError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fpplab
