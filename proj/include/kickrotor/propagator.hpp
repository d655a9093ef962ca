#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kickrotor/params.hpp"
#include "kickrotor/state.hpp"

namespace kr {

/// Default edge-probability level above which a run is flagged as contaminated
/// by the finite basis.
inline constexpr double kEdgeThreshold = 1e-16;

/// f_M(n) for the 0-based kick index n: +1 on the first M kicks of every 2M block.
int kick_sign(std::int64_t n, std::int64_t M);

enum class PlanEffort { Estimate, Measure };

/// Kicks to apply and the kicks after which P(m) and the energy are captured.
/// record_kicks may contain 0 to capture the initial state.
struct PropagationSchedule {
    std::int64_t n_kicks = 0;
    std::vector<std::int64_t> record_kicks;
    /// Extra energy-only samples every this many kicks (0 disables).
    std::int64_t energy_every = 0;

    /// Throws std::invalid_argument when record_kicks is unsorted or out of range.
    void validate() const;
};

struct EvolveOptions {
    double edge_threshold = kEdgeThreshold;
    /// Estimate plans are chosen deterministically, so reruns are bit-identical.
    PlanEffort effort = PlanEffort::Estimate;
};

struct EvolveResult {
    QuantumState state;
    std::vector<DistributionRecord> distributions;
    std::vector<EnergyRecord> energies;
    /// Kick index at which the edge probability first exceeded the threshold.
    std::optional<std::int64_t> first_edge_overflow;
    double max_edge_probability = 0.0;
};

/// Angle <-> momentum transform pair for one grid. The kick is applied as a
/// pointwise phase on the angle grid theta_j = 2 pi j / N, N = 2 m_max, where the
/// angle representation is psi(theta) = sum_m C_m exp(-i m theta). In the |m> basis
/// the kick then has elements i^(m1-m2) J_(m1-m2)(k).
/// Owns FFT plans and scratch, so one instance must not be shared between threads.
class SpectralPropagator {
public:
    explicit SpectralPropagator(int m_max, PlanEffort effort = PlanEffort::Estimate);
    ~SpectralPropagator();
    SpectralPropagator(SpectralPropagator&&) noexcept;
    SpectralPropagator& operator=(SpectralPropagator&&) noexcept;
    SpectralPropagator(const SpectralPropagator&) = delete;
    SpectralPropagator& operator=(const SpectralPropagator&) = delete;

    const MGrid& grid() const;

    /// C <- exp(-i sign k cos(theta)) C, in place on storage-ordered amplitudes.
    void kick(std::span<cplx> amps, double k, int sign);
    /// One full period: kick then free rotation by exp(i tau m^2 / 2).
    void step(std::span<cplx> amps, double k, double tau, int sign);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;

    friend EvolveResult evolve(QuantumState, const RotorParams&, const PropagationSchedule&,
                               const EvolveOptions&);
};

QuantumState apply_kick(QuantumState state, double k, int sign);
QuantumState apply_free(QuantumState state, double tau);
/// (-1)^m on every amplitude; exact, so applying it twice is the identity bit for bit.
QuantumState apply_d_operator(QuantumState state);
/// Free rotation over the delay t_d = 2 pi T / tau, i.e. exp(i pi m^2).
QuantumState apply_time_delay(QuantumState state);

/// Applies schedule.n_kicks kick+free periods according to params.variant.
/// Record kicks are counted from the start of this call; the sign pattern and
/// the D placement follow the absolute kick index of the state.
/// For MkrDOperator and MkrTimeDelay the extra factor follows every M-th period.
EvolveResult evolve(QuantumState state, const RotorParams& params, const PropagationSchedule& schedule,
                    const EvolveOptions& options = {});

/// (tau^2 / 2) sum_m m^2 |C_m|^2
double scaled_energy(const QuantumState& state, double tau);
DistributionRecord momentum_distribution(const QuantumState& state, const RotorParams& params = {});

/// exp(i tau m^2 / 2) on the grid, storage order.
std::vector<cplx> free_phases(const MGrid& grid, double tau);
/// exp(i pi m^2), evaluated with m^2 reduced mod 2 exactly.
std::vector<cplx> time_delay_phases(const MGrid& grid);

}  // namespace kr
