#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kickrotor/params.hpp"

namespace kr {

/// Point of the classical phase space: scaled momentum L and angle theta.
struct PhasePoint {
    double L = 0.0;
    double theta = 0.0;
};

/// Map x into [0, 2 pi).
double fold_angle(double x);

/// Classical trajectories. points hold the folded momentum (L in [0, 2 pi)) and
/// theta in [0, 2 pi); the dynamics only sees L mod 2 pi, so this loses nothing.
/// unwrapped_L carries the true momentum for drift and energy measurements.
struct ClassicalEnsemble {
    std::vector<PhasePoint> points;
    std::vector<double> unwrapped_L;
    std::int64_t kick_index = 0;

    std::size_t size() const { return points.size(); }

    /// Trajectories starting from the given (L, theta) pairs.
    static ClassicalEnsemble from_points(const std::vector<PhasePoint>& seeds);
    /// n points with theta uniform in [0, 2 pi) and momentum L0, from a seeded 64-bit generator.
    static ClassicalEnsemble uniform_theta(std::size_t n, std::uint64_t seed, double L0 = 0.0);
    /// n points uniform in a disk of the given radius around center.
    static ClassicalEnsemble disk(PhasePoint center, double radius, std::size_t n, std::uint64_t seed);
};

/// L <- L + sign kappa sin(theta), then theta <- (theta + L) mod 2 pi.
ClassicalEnsemble std_map_step(ClassicalEnsemble ensemble, double kappa, int sign);

/// n_kicks steps with sign f_M(n), n counted from ensemble.kick_index.
/// Points are independent; threads > 1 splits them into contiguous chunks and
/// gives bit-identical results to the sequential run.
ClassicalEnsemble mkr_map_evolve(ClassicalEnsemble ensemble, double kappa, std::int64_t M, std::int64_t n_kicks,
                                 unsigned threads = 1);

/// One step of a single point without folding, for derivative checks.
PhasePoint map_point(PhasePoint p, double kappa, int sign);

struct SectionWindow {
    double L_lo = 0.0, L_hi = 6.283185307179586;
    double theta_lo = 0.0, theta_hi = 6.283185307179586;

    bool contains(const PhasePoint& p) const {
        return p.L >= L_lo && p.L <= L_hi && p.theta >= theta_lo && p.theta <= theta_hi;
    }
};

/// Folded post-step points of every seed, keeping those inside window. One
/// point per `stride` kicks.
std::vector<PhasePoint> poincare_section(double kappa, std::int64_t M, const std::vector<PhasePoint>& seeds,
                                         std::int64_t n_kicks, const SectionWindow& window = {},
                                         std::int64_t stride = 1);

/// <L^2>/2 over the unwrapped momenta.
double mean_energy(const ClassicalEnsemble& ensemble);

struct EnergySample {
    std::int64_t kick = 0;
    double mean_energy = 0.0;
};

/// Evolves the ensemble and samples mean_energy at the given (increasing) kick counts.
std::vector<EnergySample> energy_curve(ClassicalEnsemble ensemble, double kappa, std::int64_t M,
                                       const std::vector<std::int64_t>& sample_kicks, unsigned threads = 1);

struct TransportOptions {
    double min_drift = 0.5;
    /// Largest arc (radians) the stroboscopic theta samples may cover for the
    /// orbit to count as confined to an island.
    double max_theta_arc = 1.0;
};

struct TransportResult {
    double drift_per_kick = 0.0;
    double theta_arc = 0.0;
    bool is_transporting = false;
};

/// Drift of one trajectory and whether it behaves like a transporting island
/// orbit. theta is sampled once per modulation period (2M kicks, or every kick
/// for the plain map). Requires n_kicks >= 100.
TransportResult detect_transporting_island(double kappa, std::int64_t M, PhasePoint seed, std::int64_t n_kicks,
                                           const TransportOptions& options = {});

struct DiskDrift {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Per-kick drift averaged over trajectories seeded uniformly in a disk.
DiskDrift disk_drift(double kappa, std::int64_t M, PhasePoint center, double radius, std::size_t n_points,
                     std::int64_t n_kicks, std::uint64_t seed = 1);

/// Newton search for a periodic orbit of `period` kicks (counted from kick 0)
/// whose momentum advances by period * drift_per_kick and whose angle returns
/// to itself mod 2 pi. Returns nothing if Newton does not converge.
std::optional<PhasePoint> find_periodic_orbit(double kappa, std::int64_t M, PhasePoint guess, std::int64_t period,
                                              double drift_per_kick, int max_iterations = 50);

}  // namespace kr
