#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kickrotor/params.hpp"

namespace kr {

using cplx = std::complex<double>;

/// Angular-momentum grid m in [-m_max, m_max). Storage index 0 holds m = -m_max,
/// which makes the grid a power-of-two transform length when m_max is.
struct MGrid {
    int m_max = 0;

    std::size_t size() const { return 2 * static_cast<std::size_t>(m_max); }
    int m_lo() const { return -m_max; }
    int m_hi() const { return m_max - 1; }
    bool contains(int m) const { return m >= -m_max && m < m_max; }
    std::size_t index(int m) const { return static_cast<std::size_t>(m + m_max); }
    int m_at(std::size_t i) const { return static_cast<int>(i) - m_max; }
};

/// Amplitudes C_m of a rotor state in the |m> basis.
class QuantumState {
public:
    /// |m0> on a grid of half-width m_max (|0> by default).
    explicit QuantumState(int m_max, int m0 = 0);
    QuantumState(int m_max, std::vector<cplx> amplitudes, std::int64_t kick_index = 0);

    const MGrid& grid() const { return grid_; }
    int m_max() const { return grid_.m_max; }
    std::size_t size() const { return amps_.size(); }

    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    cplx operator[](int m) const { return amps_[grid_.index(m)]; }
    cplx& operator[](int m) { return amps_[grid_.index(m)]; }

    std::int64_t kick_index() const { return kick_index_; }
    void set_kick_index(std::int64_t n) { kick_index_ = n; }

    double norm_squared() const;
    /// Largest |C_m|^2 over the two grid edges m = -m_max and m = m_max - 1.
    double edge_probability() const;

private:
    MGrid grid_;
    std::vector<cplx> amps_;
    std::int64_t kick_index_ = 0;
};

/// P(m) snapshot on the state's grid.
struct DistributionRecord {
    MGrid grid;
    std::vector<double> p;
    std::int64_t kick_index = 0;
    RotorParams params;

    double operator[](int m) const { return p[grid.index(m)]; }
};

struct EnergyRecord {
    std::int64_t kick_index = 0;
    double e_tilde = 0.0;
};

}  // namespace kr
