#include "kickrotor/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kr {

namespace {

struct Samples {
    std::vector<double> x, y;
};

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
    double sse = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - l.intercept - l.slope * x[i];
        l.sse += r * r;
    }
    return l;
}

int first_fitted(const FitOptions& o) { return o.central_exclusion / 2 + 1; }

// Points (|m|, ln P) on one side (sign = +1 or -1) between the exclusion zone
// and the outermost point above the floor.
Samples side_samples(const DistributionRecord& dist, int sign, const FitOptions& o) {
    const auto& g = dist.grid;
    const int lo = first_fitted(o);
    const int reach = sign > 0 ? g.m_hi() : -g.m_lo();
    Samples s;
    for (int x = lo; x <= reach; ++x) {
        const double p = dist[sign * x];
        if (p > o.floor) {
            s.x.push_back(x);
            s.y.push_back(std::log(p));
        }
    }
    return s;
}

// (block centre, ln of mean P) over blocks of `width` consecutive |m|, both
// signs pooled. Blocks are kept while their mean stays above the floor.
Samples binned_samples(const DistributionRecord& dist, int width, const FitOptions& o) {
    const auto& g = dist.grid;
    const int lo = first_fitted(o);
    const int reach = std::min(g.m_hi(), -g.m_lo());
    Samples s;
    for (int start = lo; start + width - 1 <= reach; start += width) {
        double sum = 0.0;
        for (int x = start; x < start + width; ++x) sum += dist[x] + dist[-x];
        const double mean = sum / (2.0 * width);
        if (mean > o.floor) {
            s.x.push_back(start + 0.5 * (width - 1));
            s.y.push_back(std::log(mean));
        }
    }
    return s;
}

// y = a + s1 x + (s2 - s1) max(0, x - b), solved by normal equations.
struct Hinge {
    double s1 = 0.0, s2 = 0.0, sse = std::numeric_limits<double>::infinity();
};

Hinge fit_hinge(const Samples& s, double b) {
    double A[3][3] = {}, r[3] = {};
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double f[3] = {1.0, s.x[i], std::max(0.0, s.x[i] - b)};
        for (int p = 0; p < 3; ++p) {
            r[p] += f[p] * s.y[i];
            for (int q = 0; q < 3; ++q) A[p][q] += f[p] * f[q];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(A[idx[row]][col]) > std::abs(A[idx[piv]][col])) piv = row;
        std::swap(idx[col], idx[piv]);
        const double d = A[idx[col]][col];
        if (std::abs(d) < 1e-300) return {};
        for (int row = col + 1; row < 3; ++row) {
            const double f = A[idx[row]][col] / d;
            for (int q = col; q < 3; ++q) A[idx[row]][q] -= f * A[idx[col]][q];
            r[idx[row]] -= f * r[idx[col]];
        }
    }
    double c[3];
    for (int col = 2; col >= 0; --col) {
        double acc = r[idx[col]];
        for (int q = col + 1; q < 3; ++q) acc -= A[idx[col]][q] * c[q];
        c[col] = acc / A[idx[col]][col];
    }
    Hinge h;
    h.s1 = c[1];
    h.s2 = c[1] + c[2];
    h.sse = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double res = s.y[i] - c[0] - c[1] * s.x[i] - c[2] * std::max(0.0, s.x[i] - b);
        h.sse += res * res;
    }
    return h;
}

double length_from_slope(double slope) {
    return slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
}

}  // namespace

LineshapeFit fit_localization_length(const DistributionRecord& dist, const FitOptions& o) {
    LineshapeFit fit;
    fit.m_lo = first_fitted(o);
    double slope_sum = 0.0, sse = 0.0;
    std::size_t count = 0;
    for (int sign : {+1, -1}) {
        const auto s = side_samples(dist, sign, o);
        if (static_cast<int>(s.x.size()) < o.min_points)
            throw FitError("only " + std::to_string(s.x.size()) + " points above the floor on the " +
                           (sign > 0 ? "positive" : "negative") + " side, need " + std::to_string(o.min_points));
        const auto line = least_squares(s.x, s.y);
        slope_sum += line.slope;
        sse += line.sse;
        count += s.x.size();
        fit.m_hi = std::max(fit.m_hi, static_cast<int>(s.x.back()));
    }
    const double slope = 0.5 * slope_sum;
    if (!(slope < 0.0)) throw FitError("distribution does not decay with |m|");
    fit.l = -1.0 / slope;
    fit.residual = std::sqrt(sse / static_cast<double>(count));
    return fit;
}

NonexponentialResult detect_nonexponential(const DistributionRecord& dist, const NonexponentialOptions& o) {
    NonexponentialResult out;
    out.fit = fit_localization_length(dist, o.fit);

    if (o.bin_width < 1) throw std::invalid_argument("bin_width must be at least 1");
    Samples pooled;
    if (o.bin_width > 1) {
        pooled = binned_samples(dist, o.bin_width, o.fit);
    } else {
        for (int sign : {+1, -1}) {
            auto s = side_samples(dist, sign, o.fit);
            pooled.x.insert(pooled.x.end(), s.x.begin(), s.x.end());
            pooled.y.insert(pooled.y.end(), s.y.begin(), s.y.end());
        }
    }
    if (static_cast<int>(pooled.x.size()) < 2 * o.min_segment_points + 1)
        throw FitError("too few samples above the floor for a two-segment fit");
    const auto single = least_squares(pooled.x, pooled.y);
    const double n = static_cast<double>(pooled.x.size());
    out.rms_single = std::sqrt(single.sse / n);

    std::vector<double> distinct = pooled.x;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    Hinge best;
    double best_break = 0.0;
    const int k = o.min_segment_points;
    for (int i = k - 1; i + k < static_cast<int>(distinct.size()); ++i) {
        const double b = distinct[static_cast<std::size_t>(i)];
        const auto h = fit_hinge(pooled, b);
        if (h.sse < best.sse) {
            best = h;
            best_break = b;
        }
    }
    if (!std::isfinite(best.sse)) {
        out.rms_two = out.rms_single;
        return out;
    }
    out.rms_two = std::sqrt(best.sse / n);
    TwoScale ts{length_from_slope(best.s1), length_from_slope(best.s2), static_cast<int>(best_break)};
    out.fit.two_scale = ts;

    const bool outer_decays = best.s2 < 0.0;
    const double gain = out.rms_two > 0.0 ? out.rms_single / out.rms_two : std::numeric_limits<double>::infinity();
    out.is_nonexponential =
        outer_decays && gain >= o.min_rms_gain && ts.l_inner >= o.min_length_ratio * ts.l_outer;
    return out;
}

SaturationResult saturation_check(std::span<const EnergyRecord> energies, KickWindow a, KickWindow b) {
    auto window_mean = [&](KickWindow w) {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& e : energies)
            if (e.kick_index >= w.first && e.kick_index <= w.last) {
                s += e.e_tilde;
                ++n;
            }
        if (n == 0)
            throw std::invalid_argument("no energy records in kicks [" + std::to_string(w.first) + ", " +
                                        std::to_string(w.last) + "]");
        return s / static_cast<double>(n);
    };
    const double ma = window_mean(a), mb = window_mean(b);
    SaturationResult r;
    r.ratio = mb / ma;
    r.saturated = r.ratio >= 0.8 && r.ratio <= 1.25;
    return r;
}

double power_law_exponent(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least two (x, y) pairs");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("power law fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return least_squares(lx, ly).slope;
}

double max_probability_ratio(const DistributionRecord& a, const DistributionRecord& b, double floor) {
    if (a.grid.m_max != b.grid.m_max) throw std::invalid_argument("distributions live on different grids");
    double best = 0.0;
    for (std::size_t i = 0; i < a.p.size(); ++i)
        if (a.p[i] > floor && b.p[i] > floor) best = std::max(best, a.p[i] / b.p[i]);
    return best;
}

}  // namespace kr
