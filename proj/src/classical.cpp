#include "kickrotor/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "kickrotor/propagator.hpp"

namespace kr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void step_range(ClassicalEnsemble& e, std::size_t first, std::size_t last, double kappa, std::int64_t M,
                std::int64_t start_kick, std::int64_t n_kicks) {
    for (std::size_t i = first; i < last; ++i) {
        double L = e.points[i].L;
        double th = e.points[i].theta;
        double u = e.unwrapped_L[i];
        for (std::int64_t n = 0; n < n_kicks; ++n) {
            const double dL = kick_sign(start_kick + n, M) * kappa * std::sin(th);
            u += dL;
            L = fold_angle(L + dL);
            th = fold_angle(th + L);
        }
        e.points[i] = {L, th};
        e.unwrapped_L[i] = u;
    }
}

// Smallest arc of the circle containing every angle.
double covering_arc(std::vector<double> angles) {
    if (angles.size() < 2) return 0.0;
    std::sort(angles.begin(), angles.end());
    double largest_gap = kTwoPi - (angles.back() - angles.front());
    for (std::size_t i = 1; i < angles.size(); ++i) largest_gap = std::max(largest_gap, angles[i] - angles[i - 1]);
    return kTwoPi - largest_gap;
}

}  // namespace

double fold_angle(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    if (y >= kTwoPi) y = 0.0;
    return y;
}

ClassicalEnsemble ClassicalEnsemble::from_points(const std::vector<PhasePoint>& seeds) {
    ClassicalEnsemble e;
    e.points.reserve(seeds.size());
    e.unwrapped_L.reserve(seeds.size());
    for (const auto& s : seeds) {
        e.points.push_back({fold_angle(s.L), fold_angle(s.theta)});
        e.unwrapped_L.push_back(s.L);
    }
    return e;
}

ClassicalEnsemble ClassicalEnsemble::uniform_theta(std::size_t n, std::uint64_t seed, double L0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<PhasePoint> seeds(n);
    for (auto& s : seeds) s = {L0, angle(rng)};
    return from_points(seeds);
}

ClassicalEnsemble ClassicalEnsemble::disk(PhasePoint center, double radius, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PhasePoint> seeds(n);
    for (auto& s : seeds) {
        const double r = radius * std::sqrt(unit(rng));
        const double a = kTwoPi * unit(rng);
        s = {center.L + r * std::cos(a), center.theta + r * std::sin(a)};
    }
    return from_points(seeds);
}

ClassicalEnsemble std_map_step(ClassicalEnsemble ensemble, double kappa, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("kick sign must be +1 or -1");
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        auto& p = ensemble.points[i];
        const double dL = sign * kappa * std::sin(p.theta);
        ensemble.unwrapped_L[i] += dL;
        p.L = fold_angle(p.L + dL);
        p.theta = fold_angle(p.theta + p.L);
    }
    ++ensemble.kick_index;
    return ensemble;
}

ClassicalEnsemble mkr_map_evolve(ClassicalEnsemble ensemble, double kappa, std::int64_t M, std::int64_t n_kicks,
                                 unsigned threads) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (n_kicks < 0) throw std::invalid_argument("n_kicks must be non-negative");
    const std::size_t n = ensemble.size();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        step_range(ensemble, 0, n, kappa, M, ensemble.kick_index, n_kicks);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t first = t * chunk, last = std::min(n, first + chunk);
            if (first >= last) break;
            pool.emplace_back([&, first, last] { step_range(ensemble, first, last, kappa, M, ensemble.kick_index, n_kicks); });
        }
    }
    ensemble.kick_index += n_kicks;
    return ensemble;
}

PhasePoint map_point(PhasePoint p, double kappa, int sign) {
    const double L = p.L + sign * kappa * std::sin(p.theta);
    return {L, p.theta + L};
}

std::vector<PhasePoint> poincare_section(double kappa, std::int64_t M, const std::vector<PhasePoint>& seeds,
                                         std::int64_t n_kicks, const SectionWindow& window, std::int64_t stride) {
    if (n_kicks < 1) throw std::invalid_argument("n_kicks must be at least 1");
    if (stride < 1) throw std::invalid_argument("stride must be at least 1");
    std::vector<PhasePoint> out;
    for (const auto& s : seeds) {
        double L = fold_angle(s.L), th = fold_angle(s.theta);
        for (std::int64_t n = 0; n < n_kicks; ++n) {
            L = fold_angle(L + kick_sign(n, M) * kappa * std::sin(th));
            th = fold_angle(th + L);
            if ((n + 1) % stride == 0 && window.contains({L, th})) out.push_back({L, th});
        }
    }
    return out;
}

double mean_energy(const ClassicalEnsemble& ensemble) {
    if (ensemble.size() == 0) throw std::invalid_argument("mean_energy of an empty ensemble");
    double s = 0.0;
    for (double L : ensemble.unwrapped_L) s += L * L;
    return 0.5 * s / static_cast<double>(ensemble.size());
}

std::vector<EnergySample> energy_curve(ClassicalEnsemble ensemble, double kappa, std::int64_t M,
                                       const std::vector<std::int64_t>& sample_kicks, unsigned threads) {
    std::vector<EnergySample> out;
    for (auto kick : sample_kicks) {
        if (kick < ensemble.kick_index) throw std::invalid_argument("sample kicks must be increasing");
        ensemble = mkr_map_evolve(std::move(ensemble), kappa, M, kick - ensemble.kick_index, threads);
        out.push_back({kick, mean_energy(ensemble)});
    }
    return out;
}

TransportResult detect_transporting_island(double kappa, std::int64_t M, PhasePoint seed, std::int64_t n_kicks,
                                           const TransportOptions& options) {
    if (n_kicks < 100) throw std::invalid_argument("need at least 100 kicks to measure drift");
    const std::int64_t period = (M == kNoFlip || M >= n_kicks) ? 1 : 2 * M;
    double L = fold_angle(seed.L), th = fold_angle(seed.theta), u = seed.L;
    std::vector<double> samples{th};
    for (std::int64_t n = 0; n < n_kicks; ++n) {
        const double dL = kick_sign(n, M) * kappa * std::sin(th);
        u += dL;
        L = fold_angle(L + dL);
        th = fold_angle(th + L);
        if ((n + 1) % period == 0) samples.push_back(th);
    }
    TransportResult r;
    r.drift_per_kick = (u - seed.L) / static_cast<double>(n_kicks);
    r.theta_arc = covering_arc(std::move(samples));
    r.is_transporting = std::abs(r.drift_per_kick) > options.min_drift && r.theta_arc <= options.max_theta_arc;
    return r;
}

DiskDrift disk_drift(double kappa, std::int64_t M, PhasePoint center, double radius, std::size_t n_points,
                     std::int64_t n_kicks, std::uint64_t seed) {
    if (n_points == 0 || n_kicks < 1) throw std::invalid_argument("disk_drift needs points and kicks");
    auto e = ClassicalEnsemble::disk(center, radius, n_points, seed);
    const auto start = e.unwrapped_L;
    e = mkr_map_evolve(std::move(e), kappa, M, n_kicks);
    DiskDrift d{0.0, 1e300, -1e300};
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double drift = (e.unwrapped_L[i] - start[i]) / static_cast<double>(n_kicks);
        d.mean += drift;
        d.min = std::min(d.min, drift);
        d.max = std::max(d.max, drift);
    }
    d.mean /= static_cast<double>(e.size());
    return d;
}

std::optional<PhasePoint> find_periodic_orbit(double kappa, std::int64_t M, PhasePoint guess, std::int64_t period,
                                              double drift_per_kick, int max_iterations) {
    if (period < 1) throw std::invalid_argument("period must be at least 1");
    PhasePoint x = guess;
    for (int it = 0; it < max_iterations; ++it) {
        // Propagate with the tangent map: each step has Jacobian
        // [[1, s k cos th], [1, 1 + s k cos th]] in (L, theta).
        double L = x.L, th = x.theta;
        double a = 1, b = 0, c = 0, d = 1;  // d(L,th)/d(L0,th0)
        for (std::int64_t n = 0; n < period; ++n) {
            const double sk = kick_sign(n, M) * kappa;
            const double g = sk * std::cos(th);
            const double na = a + g * c, nb = b + g * d;
            a = na;
            b = nb;
            c = c + a;
            d = d + b;
            L += sk * std::sin(th);
            th += L;
        }
        const double fL = L - x.L - drift_per_kick * static_cast<double>(period);
        const double dth = th - x.theta;
        const double fth = dth - kTwoPi * std::round(dth / kTwoPi);
        if (std::hypot(fL, fth) < 1e-13) return x;
        const double ja = a - 1, jb = b, jc = c, jd = d - 1;
        const double det = ja * jd - jb * jc;
        if (std::abs(det) < 1e-300) return std::nullopt;
        x.L -= (jd * fL - jb * fth) / det;
        x.theta -= (-jc * fL + ja * fth) / det;
    }
    return std::nullopt;
}

}  // namespace kr
