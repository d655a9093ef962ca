#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "kickrotor/propagator.hpp"
#include "oracle.hpp"

using namespace kr;
using oracle::cplx;

namespace {

std::vector<cplx> amps(const QuantumState& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

double max_diff(const QuantumState& a, const QuantumState& b) { return oracle::max_abs_diff(amps(a), amps(b)); }

QuantumState random_state(int m_max, std::uint64_t seed, std::size_t support = 0) {
    return QuantumState(m_max, oracle::random_state(2 * static_cast<std::size_t>(m_max), seed, support));
}

RotorParams mkr(double k, double tau, std::int64_t M, Variant v) { return validate({k, tau, M, v}); }

}  // namespace

TEST_CASE("QuantumState construction and grid mapping") {
    QuantumState s(8, 3);
    CHECK(s.size() == 16);
    CHECK(s.grid().index(-8) == 0);
    CHECK(s.grid().m_at(0) == -8);
    CHECK(s[3] == cplx(1.0));
    CHECK(s.norm_squared() == 1.0);
    CHECK_THROWS_AS(QuantumState(8, 8), std::invalid_argument);
    CHECK_THROWS_AS(QuantumState(0), std::invalid_argument);
    CHECK_THROWS_AS(QuantumState(4, std::vector<cplx>(7)), std::invalid_argument);
}

TEST_CASE("zero-strength kick is the identity") {
    const auto s = random_state(32, 1);
    CHECK(max_diff(apply_kick(s, 0.0, 1), s) < 1e-15);
}

TEST_CASE("kick on |0> gives i^m J_m(k)") {
    const double k = 4.0;
    const auto s = apply_kick(QuantumState(64), k, 1);
    const auto dense = oracle::kick_matrix(-64, 128, k, 1);
    std::vector<cplx> e0(128);
    e0[64] = 1.0;
    const auto ref = oracle::apply(dense, e0);
    CHECK(oracle::max_abs_diff(amps(s), ref) < 1e-13);
    for (int m = -10; m <= 10; ++m) CHECK(std::abs(s[m] - oracle::i_pow(m) * oracle::bessel_j(m, k)) < 1e-13);
}

TEST_CASE("opposite kicks cancel") {
    const auto s = random_state(64, 2);
    const auto back = apply_kick(apply_kick(s, 4.0, 1), 4.0, -1);
    CHECK(max_diff(back, s) < 1e-12);
    CHECK_THROWS_AS(apply_kick(s, 1.0, 0), std::invalid_argument);
}

TEST_CASE("free evolution") {
    const auto s = random_state(32, 3);
    CHECK(max_diff(apply_free(s, 0.0), s) == 0.0);
    const auto twice = apply_free(apply_free(s, 2.0 * std::numbers::pi), 2.0 * std::numbers::pi);
    const auto once = apply_free(s, 4.0 * std::numbers::pi);
    CHECK(max_diff(twice, once) < 1e-12);

    const auto m3 = apply_free(QuantumState(16, 3), 2.0);
    CHECK(std::abs(m3[3] - std::polar(1.0, 9.0)) < 1e-15);
    CHECK(apply_free(s, 1.234).norm_squared() == doctest::Approx(s.norm_squared()).epsilon(1e-15));
}

TEST_CASE("D operator") {
    CHECK(apply_d_operator(QuantumState(8, 0))[0] == cplx(1.0));
    CHECK(apply_d_operator(QuantumState(8, 1))[1] == cplx(-1.0));
    CHECK(apply_d_operator(QuantumState(8, -3))[-3] == cplx(-1.0));
    for (int m_max : {7, 8, 33}) {
        const auto s = random_state(m_max, 4);
        const auto dd = apply_d_operator(apply_d_operator(s));
        CHECK(std::memcmp(dd.amplitudes().data(), s.amplitudes().data(), s.size() * sizeof(cplx)) == 0);
        const auto d = apply_d_operator(s);
        for (int m = -m_max; m < m_max; ++m) CHECK(d[m] == (m % 2 == 0 ? s[m] : -s[m]));
    }
}

TEST_CASE("time delay equals the D operator") {
    const auto s = random_state(32, 5);
    CHECK(max_diff(apply_time_delay(s), apply_d_operator(s)) < 1e-15);
}

TEST_CASE("kick sign convention: the first M kicks are positive") {
    CHECK(kick_sign(0, 3) == 1);
    CHECK(kick_sign(2, 3) == 1);
    CHECK(kick_sign(3, 3) == -1);
    CHECK(kick_sign(5, 3) == -1);
    CHECK(kick_sign(6, 3) == 1);
    CHECK(kick_sign(12345, kNoFlip) == 1);
}

TEST_CASE("scaled energy") {
    CHECK(scaled_energy(QuantumState(16), 2.0) == 0.0);
    QuantumState s(16, std::vector<cplx>(32));
    s[1] = s[-1] = 1.0 / std::sqrt(2.0);
    CHECK(scaled_energy(s, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("momentum distribution") {
    const auto d0 = momentum_distribution(QuantumState(16));
    CHECK(d0[0] == 1.0);
    double total = 0;
    for (double p : d0.p) total += p;
    CHECK(total == 1.0);

    const auto s = random_state(64, 6);
    const auto d = momentum_distribution(s);
    total = 0;
    for (double p : d.p) {
        CHECK(p >= 0.0);
        total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("schedule validation") {
    PropagationSchedule s{10, {0, 5, 10}, 0};
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS((PropagationSchedule{10, {5, 3}, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PropagationSchedule{10, {5, 5}, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PropagationSchedule{10, {11}, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PropagationSchedule{-1, {}, 0}.validate()), std::invalid_argument);
}

TEST_CASE("evolve records at scheduled kicks and every energy_every kicks") {
    const auto r = evolve(QuantumState(64), mkr(2.0, 1.0, 2, Variant::MkrSignFlip), {20, {0, 7, 20}, 5});
    REQUIRE(r.distributions.size() == 3);
    CHECK(r.distributions[0].kick_index == 0);
    CHECK(r.distributions[1].kick_index == 7);
    CHECK(r.distributions[2].kick_index == 20);
    std::vector<std::int64_t> kicks;
    for (const auto& e : r.energies) kicks.push_back(e.kick_index);
    CHECK(kicks == std::vector<std::int64_t>{0, 5, 7, 10, 15, 20});
    CHECK(r.state.kick_index() == 20);
    for (const auto& e : r.energies) CHECK(e.e_tilde >= 0.0);
}

TEST_CASE("evolve matches explicit kick and free steps") {
    const auto p = mkr(3.0, 1.3, 3, Variant::MkrSignFlip);
    QuantumState s(64);
    for (int n = 0; n < 9; ++n) s = apply_free(apply_kick(s, p.k, kick_sign(n, p.M)), p.tau);
    const auto r = evolve(QuantumState(64), p, {9, {}, 0});
    CHECK(max_diff(r.state, s) < 1e-12);
}

TEST_CASE("evolve continues the sign pattern from the state's kick index") {
    const auto p = mkr(3.0, 1.3, 3, Variant::MkrSignFlip);
    const auto whole = evolve(QuantumState(64), p, {10, {}, 0});
    auto half = evolve(QuantumState(64), p, {4, {}, 0});
    const auto rest = evolve(half.state, p, {6, {}, 0});
    CHECK(rest.state.kick_index() == 10);
    CHECK(max_diff(rest.state, whole.state) < 1e-13);

    const auto pd = mkr(3.0, 1.3, 3, Variant::MkrDOperator);
    const auto whole_d = evolve(QuantumState(64), pd, {10, {}, 0});
    const auto part_d = evolve(evolve(QuantumState(64), pd, {4, {}, 0}).state, pd, {6, {}, 0});
    CHECK(max_diff(part_d.state, whole_d.state) < 1e-13);
}

TEST_CASE("sign flip over 2M kicks equals (D F^M)^2") {
    for (std::int64_t M : {1, 2, 5}) {
        const auto a = evolve(QuantumState(128), mkr(4.0, 2.0, M, Variant::MkrSignFlip), {2 * M, {}, 0});
        const auto b = evolve(QuantumState(128), mkr(4.0, 2.0, M, Variant::MkrDOperator), {2 * M, {}, 0});
        CHECK(max_diff(a.state, b.state) < 1e-10);
    }
}

TEST_CASE("at odd multiples of M the realizations differ by D only") {
    // D F^M D = F(-k)^M, so after one block the two states differ by the D factor.
    const std::int64_t M = 3;
    const auto a = evolve(QuantumState(128), mkr(4.0, 2.0, M, Variant::MkrSignFlip), {M, {}, 0});
    const auto b = evolve(QuantumState(128), mkr(4.0, 2.0, M, Variant::MkrDOperator), {M, {}, 0});
    CHECK(max_diff(a.state, b.state) > 1e-3);
    CHECK(max_diff(apply_d_operator(a.state), b.state) < 1e-12);
    const auto pa = momentum_distribution(a.state), pb = momentum_distribution(b.state);
    for (std::size_t i = 0; i < pa.p.size(); ++i) CHECK(std::abs(pa.p[i] - pb.p[i]) < 1e-14);
}

TEST_CASE("property: realizations agree at even multiples of M") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const double k = std::uniform_real_distribution<double>(0.5, 6.0)(rng);
        const double tau = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
        const std::int64_t M = 1 + static_cast<std::int64_t>(rng() % 6);
        const std::int64_t kicks = 2 * M * (1 + static_cast<std::int64_t>(rng() % 3));
        const auto init = random_state(128, rng(), 16);
        const auto a = evolve(init, mkr(k, tau, M, Variant::MkrSignFlip), {kicks, {}, 0});
        const auto b = evolve(init, mkr(k, tau, M, Variant::MkrDOperator), {kicks, {}, 0});
        const auto c = evolve(init, mkr(k, tau, M, Variant::MkrTimeDelay), {kicks, {}, 0});
        CHECK(max_diff(a.state, b.state) < 1e-10);
        CHECK(max_diff(b.state, c.state) < 1e-10);
    }
}

TEST_CASE("spectral propagation matches the dense Bessel matrix kick by kick") {
    const int m_max = 64;
    for (double k : {1.0, 4.0, 10.0}) {
        for (double tau : {1.0, 2.0}) {
            const auto dense = oracle::kr_matrix(-m_max, 2 * m_max, k, tau);
            SpectralPropagator prop(m_max);
            std::vector<cplx> v(2 * m_max);
            v[m_max] = 1.0;
            int checked = 0;
            for (int kick = 0; kick < 40; ++kick) {
                // Stop once probability approaches the outer quarter of the grid,
                // where a periodic grid and a hard-walled matrix part ways.
                double outer = 0;
                for (int i = 0; i < 2 * m_max; ++i)
                    if (std::abs(i - m_max) > 32) outer += std::norm(v[i]);
                if (outer > 1e-24) break;
                const auto ref = oracle::apply(dense, v);
                prop.step(v, k, tau, 1);
                INFO("k=" << k << " tau=" << tau << " kick=" << kick);
                CHECK(oracle::max_abs_diff(v, ref) < 1e-10);
                ++checked;
            }
            CHECK(checked >= 1);
        }
    }
}

TEST_CASE("spectral kick of random central states matches the dense oracle") {
    const int m_max = 64;
    for (double k : {1.0, 4.0, 10.0}) {
        const auto dense = oracle::kr_matrix(-m_max, 2 * m_max, k, 2.0);
        SpectralPropagator prop(m_max);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto v = oracle::random_state(2 * m_max, seed, 24);
            const auto ref = oracle::apply(dense, v);
            prop.step(v, k, 2.0, 1);
            CHECK(oracle::max_abs_diff(v, ref) < 1e-10);
        }
    }
}

TEST_CASE("unitarity over many kicks") {
    const auto r = evolve(QuantumState(512), mkr(4.0, 2.0, 50, Variant::MkrSignFlip), {2000, {}, 0});
    CHECK(std::abs(r.state.norm_squared() - 1.0) < 1e-10);
}

TEST_CASE("parity: P(m) = P(-m) from |0>") {
    for (auto v : {Variant::PlainKR, Variant::MkrSignFlip, Variant::MkrDOperator}) {
        const auto r = evolve(QuantumState(256), mkr(4.0, 2.0, 5, v), {500, {500}, 0});
        const auto& d = r.distributions.back();
        // Round-off is absolute in the amplitudes, so |C_m| and |C_-m| agree to a
        // fixed tolerance and P(m) agrees relatively only where it is large.
        double max_abs = 0;
        for (int m = 1; m < 256; ++m) max_abs = std::max(max_abs, std::abs(std::sqrt(d[m]) - std::sqrt(d[-m])));
        CHECK(max_abs < 1e-13);
        for (int m = 1; m < 256; ++m)
            if (d[m] > 1e-3) CHECK(std::abs(d[m] - d[-m]) <= 1e-12 * d[m]);
    }
}

TEST_CASE("edge overflow is reported with its first kick") {
    const auto r = evolve(QuantumState(16), mkr(5.0, 1.0, 2, Variant::MkrSignFlip), {50, {}, 0});
    REQUIRE(r.first_edge_overflow.has_value());
    CHECK(*r.first_edge_overflow >= 1);
    CHECK(*r.first_edge_overflow <= 50);
    CHECK(r.max_edge_probability > kEdgeThreshold);

    const auto quiet = evolve(QuantumState(256), mkr(1.0, 1.0, 2, Variant::MkrSignFlip), {20, {}, 0});
    CHECK_FALSE(quiet.first_edge_overflow.has_value());
}
