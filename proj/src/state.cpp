#include "kickrotor/state.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace kr {

QuantumState::QuantumState(int m_max, int m0) : grid_{m_max} {
    if (m_max < 1) throw std::invalid_argument("m_max must be positive");
    if (!grid_.contains(m0)) throw std::invalid_argument("initial m outside the grid");
    amps_.assign(grid_.size(), cplx{});
    amps_[grid_.index(m0)] = 1.0;
}

QuantumState::QuantumState(int m_max, std::vector<cplx> amplitudes, std::int64_t kick_index)
    : grid_{m_max}, amps_(std::move(amplitudes)), kick_index_(kick_index) {
    if (m_max < 1) throw std::invalid_argument("m_max must be positive");
    if (amps_.size() != grid_.size())
        throw std::invalid_argument("expected " + std::to_string(grid_.size()) + " amplitudes, got " +
                                    std::to_string(amps_.size()));
}

double QuantumState::norm_squared() const {
    double s = 0.0;
    for (const auto& c : amps_) s += std::norm(c);
    return s;
}

double QuantumState::edge_probability() const {
    return std::max(std::norm(amps_.front()), std::norm(amps_.back()));
}

}  // namespace kr
