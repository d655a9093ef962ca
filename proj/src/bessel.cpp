#include "kickrotor/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kr {

std::vector<double> bessel_j_table(double x, int nu_max) {
    if (nu_max < 0) throw std::invalid_argument("nu_max must be non-negative");
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("bessel argument must be finite and >= 0");

    std::vector<double> out(static_cast<std::size_t>(nu_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }

    // Start far enough above both nu_max and x that the dominated solution
    // has died out by the time the recurrence reaches the requested orders.
    const double top = std::max<double>(nu_max, x);
    const int start = 2 * ((static_cast<int>(top) + 30 + static_cast<int>(std::sqrt(60.0 * top))) / 2);

    constexpr double kBig = 1e250;
    constexpr double kRescale = 1e-250;

    double j_next = 0.0;     // J_{n+1}
    double j_cur = 1e-300;   // J_n, arbitrary seed
    double norm = 0.0;       // J_0 + 2 * sum J_{2k}, in the same scale
    const double two_over_x = 2.0 / x;

    for (int n = start; n > 0; --n) {
        if (n <= nu_max) out[static_cast<std::size_t>(n)] = j_cur;
        if (n % 2 == 0) norm += 2.0 * j_cur;
        const double j_prev = n * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if (std::abs(j_cur) > kBig) {
            j_cur *= kRescale;
            j_next *= kRescale;
            norm *= kRescale;
            const int hi = std::min(nu_max, start);
            for (int m = n; m <= hi; ++m) out[static_cast<std::size_t>(m)] *= kRescale;
        }
    }
    out[0] = j_cur;
    norm += j_cur;

    const double scale = 1.0 / norm;
    for (auto& v : out) {
        v *= scale;
        if (std::abs(v) < 1e-290) v = 0.0;
    }
    return out;
}

}  // namespace kr
