#pragma once

#include <stdexcept>

namespace kr {

/// A numerical routine failed (eigensolver non-convergence, basis too small).
/// Configuration problems use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kr
