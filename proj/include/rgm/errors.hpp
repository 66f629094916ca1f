#pragma once

#include <stdexcept>
#include <string>

namespace rgm {

/// Cone violations, singular matrices, unstable models, exhausted iteration
/// budgets that callers asked to treat as hard failures.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File format violations and filesystem failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rgm
