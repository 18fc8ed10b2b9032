#pragma once

#include <stdexcept>

namespace gibbslab {

// Enumeration or scan work would exceed the configured budget.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A kernel entry required to be strictly positive was zero or negative.
struct positivity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One-point data failed an exchange/cycle gate beyond tolerance.
struct inconsistent_kernel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Potential has neither finite range nor tail metadata.
struct unsupported_potential_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gibbslab
