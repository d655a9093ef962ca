#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kickrotor/state.hpp"

namespace kr {

struct TwoScale {
    double l_inner = 0.0;  // +inf when the inner segment does not decay
    double l_outer = 0.0;
    int m_break = 0;
};

struct LineshapeFit {
    double l = 0.0;
    int m_lo = 0;
    int m_hi = 0;
    double residual = 0.0;  // RMS residual of ln P
    std::optional<TwoScale> two_scale;
};

struct FitOptions {
    /// P(m) at or below this is treated as noise and skipped.
    double floor = 1e-15;
    /// Number of central states (around m = 0) left out of every fit.
    int central_exclusion = 5;
    /// Minimum number of usable points on each side of m = 0.
    int min_points = 10;
};

/// Thrown when a distribution has too few points above the floor to fit.
class FitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Least-squares line through ln P(m) against |m| on each side of m = 0 over
/// [m_lo, m_hi], m_hi being the outermost |m| with P above the floor. The two
/// slopes are averaged and l = -1 / slope.
LineshapeFit fit_localization_length(const DistributionRecord& dist, const FitOptions& options = {});

struct NonexponentialResult {
    bool is_nonexponential = false;
    double rms_single = 0.0;
    double rms_two = 0.0;
    LineshapeFit fit;  // single-exponential l plus the broken-line two_scale
};

struct NonexponentialOptions {
    FitOptions fit;
    double min_rms_gain = 2.0;
    double min_length_ratio = 2.0;
    /// Each segment of the broken line must own at least this many distinct |m|.
    int min_segment_points = 5;
    /// Consecutive |m| values whose P (both signs) are averaged into one sample
    /// before fitting. 1 fits the raw points.
    int bin_width = 1;
};

/// Continuous two-segment fit of ln P against |m| with a free breakpoint.
/// With bin_width > 1 both fits run on ln of block-averaged P, which removes
/// most of the point-to-point speckle of a single snapshot.
/// Nonexponential when it beats the single line's RMS residual by
/// min_rms_gain and the inner length exceeds the outer one by min_length_ratio.
NonexponentialResult detect_nonexponential(const DistributionRecord& dist, const NonexponentialOptions& options = {});

struct KickWindow {
    std::int64_t first = 0;
    std::int64_t last = 0;  // inclusive
};

struct SaturationResult {
    bool saturated = false;
    double ratio = 0.0;
};

/// ratio = mean E over window_b / mean E over window_a; saturated when ratio is in [0.8, 1.25].
SaturationResult saturation_check(std::span<const EnergyRecord> energies, KickWindow window_a, KickWindow window_b);

/// Exponent of y ~ x^p from a least-squares line in log-log coordinates.
double power_law_exponent(std::span<const double> x, std::span<const double> y);

/// max over m of P_a(m) / P_b(m), restricted to m where both exceed the floor.
double max_probability_ratio(const DistributionRecord& a, const DistributionRecord& b, double floor = 1e-15);

}  // namespace kr
