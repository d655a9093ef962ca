#include "kickrotor/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

namespace kr {

namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void multiply(std::span<cplx> a, std::span<const cplx> b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
}

}  // namespace

int kick_sign(std::int64_t n, std::int64_t M) {
    if (M == kNoFlip) return 1;
    return (n % (2 * M)) < M ? 1 : -1;
}

std::vector<cplx> free_phases(const MGrid& grid, double tau) {
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double m = grid.m_at(i);
        const double angle = std::fmod(0.5 * tau * (m * m), 2.0 * std::numbers::pi);
        out[i] = std::polar(1.0, angle);
    }
    return out;
}

std::vector<cplx> time_delay_phases(const MGrid& grid) {
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const long long m = grid.m_at(i);
        out[i] = std::polar(1.0, std::numbers::pi * static_cast<double>((m * m) % 2));
    }
    return out;
}

struct SpectralPropagator::Impl {
    MGrid grid;
    fftw_complex* buf = nullptr;
    fftw_plan to_angle = nullptr;
    fftw_plan to_momentum = nullptr;

    // Cached phase tables.
    double kick_k = std::nan("");
    std::vector<cplx> kick_plus, kick_minus;
    double free_tau = std::nan("");
    std::vector<cplx> free_scaled;  // exp(i tau m^2/2) / N

    Impl(int m_max, PlanEffort effort) : grid{m_max} {
        if (m_max < 1) throw std::invalid_argument("m_max must be positive");
        const int n = static_cast<int>(grid.size());
        std::lock_guard lock(planner_mutex());
        buf = fftw_alloc_complex(grid.size());
        const unsigned flags = effort == PlanEffort::Measure ? FFTW_MEASURE : FFTW_ESTIMATE;
        // psi(theta) = sum_m C_m exp(-i m theta).
        to_angle = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
        to_momentum = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
        if (!to_angle || !to_momentum) throw std::runtime_error("FFT planning failed");
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (to_angle) fftw_destroy_plan(to_angle);
        if (to_momentum) fftw_destroy_plan(to_momentum);
        if (buf) fftw_free(buf);
    }

    std::span<cplx> data() { return {reinterpret_cast<cplx*>(buf), grid.size()}; }

    void prepare_kick(double k) {
        if (k == kick_k) return;
        const std::size_t n = grid.size();
        kick_plus.resize(n);
        kick_minus.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
            // Angles are measured from theta = pi, so the kick reads exp(-i k cos theta)
            // there and its momentum elements are i^(m1-m2) J_(m1-m2)(k).
            kick_plus[j] = std::polar(1.0, k * std::cos(theta));
            kick_minus[j] = std::conj(kick_plus[j]);
        }
        kick_k = k;
    }

    void prepare_free(double tau) {
        if (tau == free_tau) return;
        free_scaled = free_phases(grid, tau);
        const double inv_n = 1.0 / static_cast<double>(grid.size());
        for (auto& z : free_scaled) z *= inv_n;
        free_tau = tau;
    }

    // Storage order is the transform order shifted by m_max = N/2, which only
    // contributes a (-1)^j factor on the angle grid. It cancels between the two
    // transforms, so the kick phase can be applied to the raw transform output.
    void kick_in_buffer(int sign) {
        fftw_execute(to_angle);
        multiply(data(), sign > 0 ? kick_plus : kick_minus);
        fftw_execute(to_momentum);
    }
};

SpectralPropagator::SpectralPropagator(int m_max, PlanEffort effort)
    : impl_(std::make_unique<Impl>(m_max, effort)) {}
SpectralPropagator::~SpectralPropagator() = default;
SpectralPropagator::SpectralPropagator(SpectralPropagator&&) noexcept = default;
SpectralPropagator& SpectralPropagator::operator=(SpectralPropagator&&) noexcept = default;

const MGrid& SpectralPropagator::grid() const { return impl_->grid; }

void SpectralPropagator::kick(std::span<cplx> amps, double k, int sign) {
    if (amps.size() != impl_->grid.size()) throw std::invalid_argument("amplitude length does not match grid");
    if (sign != 1 && sign != -1) throw std::invalid_argument("kick sign must be +1 or -1");
    impl_->prepare_kick(k);
    auto buf = impl_->data();
    std::copy(amps.begin(), amps.end(), buf.begin());
    impl_->kick_in_buffer(sign);
    const double inv_n = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = buf[i] * inv_n;
}

void SpectralPropagator::step(std::span<cplx> amps, double k, double tau, int sign) {
    if (amps.size() != impl_->grid.size()) throw std::invalid_argument("amplitude length does not match grid");
    if (sign != 1 && sign != -1) throw std::invalid_argument("kick sign must be +1 or -1");
    impl_->prepare_kick(k);
    impl_->prepare_free(tau);
    auto buf = impl_->data();
    std::copy(amps.begin(), amps.end(), buf.begin());
    impl_->kick_in_buffer(sign);
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = buf[i] * impl_->free_scaled[i];
}

void PropagationSchedule::validate() const {
    if (n_kicks < 0) throw std::invalid_argument("n_kicks must be non-negative");
    if (energy_every < 0) throw std::invalid_argument("energy_every must be non-negative");
    for (std::size_t i = 0; i < record_kicks.size(); ++i) {
        const auto r = record_kicks[i];
        if (r < 0 || r > n_kicks)
            throw std::invalid_argument("record kick " + std::to_string(r) + " outside [0, n_kicks]");
        if (i > 0 && r <= record_kicks[i - 1])
            throw std::invalid_argument("record kicks must be strictly increasing");
    }
}

QuantumState apply_kick(QuantumState state, double k, int sign) {
    SpectralPropagator prop(state.m_max());
    prop.kick(state.amplitudes(), k, sign);
    return state;
}

QuantumState apply_free(QuantumState state, double tau) {
    multiply(state.amplitudes(), free_phases(state.grid(), tau));
    return state;
}

QuantumState apply_d_operator(QuantumState state) {
    auto a = state.amplitudes();
    // Storage index i holds m = i - m_max.
    const std::size_t first_odd = static_cast<std::size_t>(state.m_max() % 2 == 0 ? 1 : 0);
    for (std::size_t i = first_odd; i < a.size(); i += 2) a[i] = -a[i];
    return state;
}

QuantumState apply_time_delay(QuantumState state) {
    multiply(state.amplitudes(), time_delay_phases(state.grid()));
    return state;
}

double scaled_energy(const QuantumState& state, double tau) {
    const auto a = state.amplitudes();
    const auto& g = state.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = g.m_at(i);
        s += m * m * std::norm(a[i]);
    }
    return 0.5 * tau * tau * s;
}

DistributionRecord momentum_distribution(const QuantumState& state, const RotorParams& params) {
    DistributionRecord rec{state.grid(), {}, state.kick_index(), params};
    rec.p.reserve(state.size());
    for (const auto& c : state.amplitudes()) rec.p.push_back(std::norm(c));
    return rec;
}

EvolveResult evolve(QuantumState state, const RotorParams& raw, const PropagationSchedule& schedule,
                    const EvolveOptions& options) {
    const RotorParams params = validate(raw);
    schedule.validate();

    SpectralPropagator::Impl impl(state.m_max(), options.effort);
    impl.prepare_kick(params.k);
    impl.prepare_free(params.tau);
    std::vector<cplx> delay;
    if (params.variant == Variant::MkrTimeDelay) delay = time_delay_phases(state.grid());

    EvolveResult result{state, {}, {}, std::nullopt, 0.0};
    auto buf = impl.data();
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), buf.begin());
    const std::int64_t start = state.kick_index();

    auto snapshot = [&](std::int64_t kick) {
        QuantumState s(state.m_max(), std::vector<cplx>(buf.begin(), buf.end()), start + kick);
        return s;
    };

    auto next_record = schedule.record_kicks.begin();
    auto capture = [&](std::int64_t kick) {
        const bool full = next_record != schedule.record_kicks.end() && *next_record == kick;
        const bool energy_only = schedule.energy_every > 0 && kick % schedule.energy_every == 0;
        if (!full && !energy_only) return;
        auto s = snapshot(kick);
        result.energies.push_back({s.kick_index(), scaled_energy(s, params.tau)});
        if (full) {
            result.distributions.push_back(momentum_distribution(s, params));
            ++next_record;
        }
    };

    capture(0);
    const bool modified = params.is_modified();
    for (std::int64_t n = 0; n < schedule.n_kicks; ++n) {
        const int sign = params.variant == Variant::MkrSignFlip ? kick_sign(start + n, params.M) : 1;
        impl.kick_in_buffer(sign);
        multiply(buf, impl.free_scaled);
        if (modified && (start + n + 1) % params.M == 0) {
            if (params.variant == Variant::MkrDOperator) {
                const std::size_t first_odd = static_cast<std::size_t>(state.m_max() % 2 == 0 ? 1 : 0);
                for (std::size_t i = first_odd; i < buf.size(); i += 2) buf[i] = -buf[i];
            } else if (params.variant == Variant::MkrTimeDelay) {
                multiply(buf, delay);
            }
        }
        const double edge = std::max(std::norm(buf.front()), std::norm(buf.back()));
        result.max_edge_probability = std::max(result.max_edge_probability, edge);
        if (edge > options.edge_threshold && !result.first_edge_overflow)
            result.first_edge_overflow = start + n + 1;
        capture(n + 1);
    }
    result.state = snapshot(schedule.n_kicks);
    return result;
}

}  // namespace kr
