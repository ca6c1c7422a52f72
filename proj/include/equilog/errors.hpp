#pragma once

#include <stdexcept>

namespace equilog {

// Vector/matrix shapes or column layouts do not line up.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid user-supplied values: probabilities outside (0,1), malformed
// datasets or configuration files, out-of-range sensitivity levels.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric routine could not complete: singular factorization, a series
// or iteration that failed to converge, a degenerate statistic.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complete or quasi-complete separation in a logistic fit. The asymptotic
// coefficient covariance is meaningless there, so the tests built on it
// must not run.
struct SeparationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace equilog
