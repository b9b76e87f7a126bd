#pragma once

#include <stdexcept>
#include <string>

namespace pairs {

// Bad inputs: parameters, configs, CSV files, shape mismatches.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Failures of the numerics themselves: solver breakdown, blow-up, loss of positivity.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pairs
