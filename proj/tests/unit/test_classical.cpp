#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "kickrotor/classical.hpp"
#include "kickrotor/lineshape.hpp"

using namespace kr;

namespace {

constexpr double pi = std::numbers::pi;

bool same_bits(const ClassicalEnsemble& a, const ClassicalEnsemble& b) {
    return a.size() == b.size() &&
           std::memcmp(a.points.data(), b.points.data(), a.size() * sizeof(PhasePoint)) == 0 &&
           std::memcmp(a.unwrapped_L.data(), b.unwrapped_L.data(), a.size() * sizeof(double)) == 0;
}

double det_jacobian_fd(PhasePoint p, double kappa, int sign, double h) {
    auto f = [&](double L, double th) { return map_point({L, th}, kappa, sign); };
    const auto dl_p = f(p.L + h, p.theta), dl_m = f(p.L - h, p.theta);
    const auto dt_p = f(p.L, p.theta + h), dt_m = f(p.L, p.theta - h);
    const double a = (dl_p.L - dl_m.L) / (2 * h), b = (dt_p.L - dt_m.L) / (2 * h);
    const double c = (dl_p.theta - dl_m.theta) / (2 * h), d = (dt_p.theta - dt_m.theta) / (2 * h);
    return a * d - b * c;
}

}  // namespace

TEST_CASE("fold_angle maps into [0, 2 pi)") {
    CHECK(fold_angle(0.0) == 0.0);
    CHECK(fold_angle(2 * pi) == 0.0);
    CHECK(fold_angle(-0.5) == doctest::Approx(2 * pi - 0.5));
    CHECK(fold_angle(7.0) == doctest::Approx(7.0 - 2 * pi));
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    for (int i = 0; i < 1000; ++i) {
        const double x = fold_angle(u(rng));
        CHECK(x >= 0.0);
        CHECK(x < 2 * pi);
    }
}

TEST_CASE("kappa = 0 is the free rotor") {
    auto e = ClassicalEnsemble::from_points({{0.3, 1.0}, {1.7, 5.0}});
    e = std_map_step(e, 0.0, 1);
    CHECK(e.unwrapped_L[0] == 0.3);
    CHECK(e.points[0].theta == doctest::Approx(1.3));
    CHECK(e.points[1].theta == doctest::Approx(fold_angle(6.7)));
    CHECK(e.kick_index == 1);
}

TEST_CASE("kappa = 2 pi transports by exactly 2 pi per kick") {
    auto e = ClassicalEnsemble::from_points({{0.0, pi / 2}});
    for (int n = 1; n <= 1000; ++n) {
        e = std_map_step(e, 2 * pi, 1);
        REQUIRE(std::abs(e.unwrapped_L[0] - 2 * pi * n) < 1e-9);
    }
    CHECK(std::abs(e.points[0].theta - pi / 2) < 1e-9);
}

TEST_CASE("M = 2, kappa = pi shifts by pi per kick from (pi, pi/2)") {
    auto e = ClassicalEnsemble::from_points({{pi, pi / 2}});
    for (int n = 1; n <= 1000; ++n) {
        e = mkr_map_evolve(e, pi, 2, 1);
        REQUIRE(std::abs(e.unwrapped_L[0] - pi - pi * n) < 1e-9);
    }
}

TEST_CASE("exact transport families for higher orders") {
    // kappa = 2 pi l2 under KR, and kappa = (2 l2 + 1) pi under M = 2.
    for (int l2 : {1, 2, 3}) {
        for (double sgn : {1.0, -1.0}) {
            auto e = ClassicalEnsemble::from_points({{2 * pi, sgn * pi / 2 + (sgn < 0 ? 2 * pi : 0.0)}});
            e = mkr_map_evolve(e, 2 * pi * l2, kNoFlip, 1000);
            CHECK(std::abs(e.unwrapped_L[0] - 2 * pi - sgn * 2 * pi * l2 * 1000) < 1e-9 * 1000 * l2);

            const double kappa = (2 * l2 + 1) * pi;
            auto m = ClassicalEnsemble::from_points({{3 * pi, sgn > 0 ? pi / 2 : 3 * pi / 2}});
            m = mkr_map_evolve(m, kappa, 2, 1000);
            CHECK(std::abs(std::abs(m.unwrapped_L[0] - 3 * pi) - kappa * 1000) < 1e-9 * 1000 * kappa);
        }
    }
}

TEST_CASE("property: one-step Jacobian determinant is 1") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    for (int i = 0; i < 1000; ++i) {
        const PhasePoint p{u(rng), u(rng)};
        const double kappa = 10.0 * u(rng) / (2 * pi);
        const int sign = (rng() & 1) ? 1 : -1;
        CHECK(std::abs(det_jacobian_fd(p, kappa, sign, 1e-6) - 1.0) < 1e-6);
    }
}

TEST_CASE("M at infinity equals repeated positive steps") {
    auto a = ClassicalEnsemble::uniform_theta(50, 7, 0.4);
    auto b = a;
    a = mkr_map_evolve(a, 5.0, kNoFlip, 200);
    for (int i = 0; i < 200; ++i) b = std_map_step(b, 5.0, 1);
    CHECK(same_bits(a, b));
}

TEST_CASE("sign modulation follows f_M") {
    auto a = ClassicalEnsemble::uniform_theta(20, 8);
    auto b = a;
    a = mkr_map_evolve(a, 3.0, 3, 13);
    const int signs[] = {1, 1, 1, -1, -1, -1, 1, 1, 1, -1, -1, -1, 1};
    for (int s : signs) b = std_map_step(b, 3.0, s);
    CHECK(same_bits(a, b));

    // Continuing from a nonzero kick index keeps the pattern.
    auto c = mkr_map_evolve(ClassicalEnsemble::uniform_theta(20, 8), 3.0, 3, 5);
    c = mkr_map_evolve(c, 3.0, 3, 8);
    CHECK(same_bits(a, c));
}

TEST_CASE("property: map commutes with L -> L + 2 pi") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    std::vector<PhasePoint> seeds, shifted;
    for (int i = 0; i < 100; ++i) {
        seeds.push_back({u(rng), u(rng)});
        shifted.push_back({seeds.back().L + 2 * pi, seeds.back().theta});
    }
    // The shifted seed differs by round-off, which chaos amplifies; stay at short times.
    const auto a = mkr_map_evolve(ClassicalEnsemble::from_points(seeds), 5.0, 2, 8);
    const auto b = mkr_map_evolve(ClassicalEnsemble::from_points(shifted), 5.0, 2, 8);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        CHECK(std::abs(a.points[i].theta - b.points[i].theta) < 1e-8);
        CHECK(std::abs(std::remainder(a.points[i].L - b.points[i].L, 2 * pi)) < 1e-8);
    }
    const auto sa = poincare_section(5.0, 2, {{1.0, 2.0}}, 8);
    const auto sb = poincare_section(5.0, 2, {{1.0 + 2 * pi, 2.0}}, 8);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        CHECK(std::abs(sa[i].theta - sb[i].theta) < 1e-8);
        CHECK(std::abs(std::remainder(sa[i].L - sb[i].L, 2 * pi)) < 1e-8);
    }
}

TEST_CASE("thread count does not change trajectories") {
    const auto init = ClassicalEnsemble::uniform_theta(1001, 9);
    const auto one = mkr_map_evolve(init, 5.0, 2, 300, 1);
    for (unsigned t : {2u, 3u, 8u}) CHECK(same_bits(mkr_map_evolve(init, 5.0, 2, 300, t), one));
}

TEST_CASE("uniform_theta is seeded and deterministic") {
    const auto a = ClassicalEnsemble::uniform_theta(100, 5);
    const auto b = ClassicalEnsemble::uniform_theta(100, 5);
    const auto c = ClassicalEnsemble::uniform_theta(100, 6);
    CHECK(same_bits(a, b));
    CHECK_FALSE(same_bits(a, c));
    for (const auto& p : a.points) {
        CHECK(p.L == 0.0);
        CHECK(p.theta >= 0.0);
        CHECK(p.theta < 2 * pi);
    }
}

TEST_CASE("mean energy") {
    CHECK(mean_energy(ClassicalEnsemble::uniform_theta(10, 1)) == 0.0);
    const auto e = ClassicalEnsemble::from_points({{1.0, 0.0}, {-3.0, 0.0}});
    CHECK(mean_energy(e) == doctest::Approx(2.5));
    CHECK_THROWS_AS(mean_energy(ClassicalEnsemble{}), std::invalid_argument);
}

TEST_CASE("kappa = 8 diffusion is quasilinear with slope about kappa^2/4") {
    auto e = ClassicalEnsemble::uniform_theta(20000, 10);
    const auto curve = energy_curve(e, 8.0, kNoFlip, {50, 100, 150, 200});
    // <L^2>/2 = (kappa^2/4) N for uncorrelated kicks.
    const double slope = (curve.back().mean_energy - curve.front().mean_energy) /
                         static_cast<double>(curve.back().kick - curve.front().kick);
    CHECK(slope == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("kappa = 5, M = 2 chaotic-sea ensemble grows superlinearly") {
    auto e = ClassicalEnsemble::uniform_theta(4000, 11);
    std::vector<std::int64_t> kicks;
    for (double x = 100; x <= 10000; x *= 1.5849) kicks.push_back(static_cast<std::int64_t>(x));
    const auto curve = energy_curve(e, 5.0, 2, kicks);
    std::vector<double> x, y;
    for (const auto& s : curve) {
        x.push_back(static_cast<double>(s.kick));
        y.push_back(s.mean_energy);
    }
    CHECK(power_law_exponent(x, y) > 1.0);
}

TEST_CASE("Newton finds the transporting orbits of kappa = 5 and 10 with M = 2") {
    const auto right = find_periodic_orbit(5.0, 2, {pi, 2.4}, 4, pi);
    REQUIRE(right.has_value());
    CHECK(right->L == doctest::Approx(pi).epsilon(1e-9));
    CHECK(right->theta == doctest::Approx(2.46220273).epsilon(1e-7));
    const auto left = find_periodic_orbit(5.0, 2, {pi, 3.8}, 4, -pi);
    REQUIRE(left.has_value());
    CHECK(left->theta == doctest::Approx(3.82098258).epsilon(1e-7));

    const auto k10 = find_periodic_orbit(10.0, 2, {pi, 1.9}, 4, 3 * pi);
    REQUIRE(k10.has_value());
    CHECK(k10->theta == doctest::Approx(1.91162558).epsilon(1e-7));

    // The orbit really closes: 4 kicks advance L by 4 pi and return theta.
    auto e = ClassicalEnsemble::from_points({*right});
    e = mkr_map_evolve(e, 5.0, 2, 4);
    CHECK(e.unwrapped_L[0] - right->L == doctest::Approx(4 * pi).epsilon(1e-9));
    CHECK(std::abs(std::remainder(e.points[0].theta - right->theta, 2 * pi)) < 1e-9);
}

TEST_CASE("transporting island detection") {
    const auto right = *find_periodic_orbit(5.0, 2, {pi, 2.4}, 4, pi);
    const auto r = detect_transporting_island(5.0, 2, right, 1000);
    CHECK(r.is_transporting);
    CHECK(r.drift_per_kick == doctest::Approx(pi).epsilon(0.05));

    const auto d = disk_drift(5.0, 2, right, 0.05, 200, 1000);
    CHECK(d.mean == doctest::Approx(pi).epsilon(0.05));

    // A chaotic-sea seed of the plain map drifts diffusively, not ballistically.
    const auto sea = detect_transporting_island(5.0, kNoFlip, {0.1, 0.1}, 2000);
    CHECK_FALSE(sea.is_transporting);

    CHECK_THROWS_AS(detect_transporting_island(5.0, 2, right, 50), std::invalid_argument);
}

TEST_CASE("plain-map regular island does not transport") {
    // Period-2 elliptic orbit of the standard map at kappa = 5 (zero net drift).
    const auto c = find_periodic_orbit(5.0, kNoFlip, {3.8, 1.65}, 2, 0.0);
    REQUIRE(c.has_value());
    const auto r = detect_transporting_island(5.0, kNoFlip, *c, 1000);
    CHECK(std::abs(r.drift_per_kick) < 0.05);
    CHECK_FALSE(r.is_transporting);
    const auto d = disk_drift(5.0, kNoFlip, *c, 0.02, 100, 1000);
    CHECK(std::abs(d.mean) < 0.05);
}

TEST_CASE("Poincare sections") {
    // kappa = 0: every orbit stays on its horizontal line.
    const auto s = poincare_section(0.0, kNoFlip, {{0.5, 0.0}, {2.0, 1.0}}, 100);
    CHECK(s.size() == 200);
    for (const auto& p : s) CHECK((std::abs(p.L - 0.5) < 1e-12 || std::abs(p.L - 2.0) < 1e-12));

    SectionWindow w{0.0, 1.0, 0.0, 2 * pi};
    const auto clipped = poincare_section(5.0, 2, {{0.5, 0.5}}, 500, w);
    for (const auto& p : clipped) CHECK(w.contains(p));

    const auto strided = poincare_section(5.0, 2, {{0.5, 0.5}}, 100, {}, 4);
    CHECK(strided.size() == 25);
}
