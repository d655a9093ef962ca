#pragma once

#include <vector>

namespace kr {

/// J_0(x) ... J_{nu_max}(x) for x >= 0, by normalized backward (Miller)
/// recurrence. Values below ~1e-280 underflow to zero.
/// Negative orders follow from J_{-n}(x) = (-1)^n J_n(x).
std::vector<double> bessel_j_table(double x, int nu_max);

}  // namespace kr
