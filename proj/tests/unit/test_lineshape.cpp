#include <doctest.h>

#include <cmath>
#include <random>

#include "kickrotor/lineshape.hpp"

using namespace kr;

namespace {

// Normalized P(m) from an unnormalized profile f(|m|).
template <class F>
DistributionRecord synthetic(int m_max, F f) {
    DistributionRecord d;
    d.grid = MGrid{m_max};
    d.p.resize(d.grid.size());
    double total = 0;
    for (std::size_t i = 0; i < d.p.size(); ++i) {
        d.p[i] = f(std::abs(d.grid.m_at(i)));
        total += d.p[i];
    }
    for (auto& p : d.p) p /= total;
    return d;
}

DistributionRecord exponential(int m_max, double l) {
    return synthetic(m_max, [l](int m) { return std::exp(-m / l); });
}

}  // namespace

TEST_CASE("fit recovers a pure exponential") {
    const auto fit = fit_localization_length(exponential(2048, 7.0));
    CHECK(fit.l == doctest::Approx(7.0).epsilon(0.01));
    CHECK(fit.m_lo == 3);
    CHECK(fit.residual < 1e-8);
    CHECK(fit.m_hi > fit.m_lo);
}

TEST_CASE("property: fit recovers l0 in [2, 500] within 1%") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(std::log(2.0), std::log(500.0));
    for (int trial = 0; trial < 40; ++trial) {
        const double l0 = std::exp(u(rng));
        const int m_max = std::max(64, static_cast<int>(std::ceil(10.0 * l0)));
        FitOptions o;
        o.floor = 0.0;
        const auto fit = fit_localization_length(exponential(m_max, l0), o);
        INFO("l0=" << l0);
        CHECK(fit.l == doctest::Approx(l0).epsilon(0.01));
    }
}

TEST_CASE("property: fit is invariant under rescaling P") {
    std::mt19937_64 rng(52);
    std::lognormal_distribution<double> noise(0.0, 0.3);
    auto d = synthetic(512, [&](int m) { return std::exp(-m / 20.0) * noise(rng); });
    const auto base = fit_localization_length(d);
    for (double s : {1e-3, 0.5, 7.0}) {
        auto scaled = d;
        for (auto& p : scaled.p) p *= s;
        FitOptions o;
        o.floor = 1e-15 * s;
        const auto fit = fit_localization_length(scaled, o);
        CHECK(fit.l == doctest::Approx(base.l).epsilon(1e-9));
        CHECK(fit.residual == doctest::Approx(base.residual).epsilon(1e-9));
    }
}

TEST_CASE("fit averages the two sides") {
    auto d = synthetic(1024, [](int) { return 1.0; });
    for (std::size_t i = 0; i < d.p.size(); ++i) {
        const int m = d.grid.m_at(i);
        d.p[i] = std::exp(-std::abs(m) / (m > 0 ? 10.0 : 20.0));
    }
    const auto fit = fit_localization_length(d);
    // Average slope of -1/10 and -1/20.
    CHECK(fit.l == doctest::Approx(1.0 / (0.5 * (0.1 + 0.05))).epsilon(1e-6));
}

TEST_CASE("fit errors on too few points") {
    const auto narrow = exponential(64, 0.2);
    CHECK_THROWS_AS(fit_localization_length(narrow), FitError);
    const auto flat = synthetic(64, [](int) { return 1.0; });
    CHECK_THROWS_AS(fit_localization_length(flat), FitError);
}

TEST_CASE("pure exponential is not nonexponential") {
    const auto r = detect_nonexponential(exponential(2048, 30.0));
    CHECK_FALSE(r.is_nonexponential);
}

TEST_CASE("property: noisy single exponentials are never flagged") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ul(3.0, 200.0), un(-0.2, 0.2);
    for (int trial = 0; trial < 60; ++trial) {
        const double l = ul(rng);
        const auto d = synthetic(4096, [&](int m) { return std::exp(-m / l) * (1.0 + un(rng)); });
        for (int bin : {1, 10}) {
            NonexponentialOptions o;
            o.bin_width = bin;
            INFO("l=" << l << " bin=" << bin);
            CHECK_FALSE(detect_nonexponential(d, o).is_nonexponential);
        }
    }
}

TEST_CASE("two-scale lineshape is flagged and its lengths recovered") {
    // Slow decay (l = 60) out to |m| = 400, then fast (l = 10).
    const auto d = synthetic(2048, [](int m) {
        return m <= 400 ? std::exp(-m / 60.0) : std::exp(-400 / 60.0 - (m - 400) / 10.0);
    });
    const auto r = detect_nonexponential(d);
    CHECK(r.is_nonexponential);
    REQUIRE(r.fit.two_scale.has_value());
    CHECK(r.fit.two_scale->l_inner == doctest::Approx(60.0).epsilon(0.02));
    CHECK(r.fit.two_scale->l_outer == doctest::Approx(10.0).epsilon(0.02));
    CHECK(std::abs(r.fit.two_scale->m_break - 400) <= 2);
    CHECK(r.rms_two < r.rms_single / 2);
}

TEST_CASE("fast-then-slow lineshape is not flagged") {
    // The inner length must exceed the outer one.
    const auto d = synthetic(2048, [](int m) {
        return m <= 100 ? std::exp(-m / 8.0) : std::exp(-100 / 8.0 - (m - 100) / 80.0);
    });
    const auto r = detect_nonexponential(d);
    CHECK_FALSE(r.is_nonexponential);
    REQUIRE(r.fit.two_scale.has_value());
    CHECK(r.fit.two_scale->l_inner < r.fit.two_scale->l_outer);
}

TEST_CASE("binning reduces speckle but keeps the envelope") {
    std::mt19937_64 rng(54);
    std::exponential_distribution<double> speckle(1.0);
    const auto d = synthetic(2048, [&](int m) {
        const double env = m <= 400 ? std::exp(-m / 60.0) : std::exp(-400 / 60.0 - (m - 400) / 10.0);
        return env * speckle(rng);
    });
    NonexponentialOptions raw, binned;
    binned.bin_width = 20;
    const auto a = detect_nonexponential(d, raw);
    const auto b = detect_nonexponential(d, binned);
    CHECK(b.rms_single < a.rms_single);
    REQUIRE(b.fit.two_scale.has_value());
    CHECK(b.fit.two_scale->l_inner == doctest::Approx(60.0).epsilon(0.15));
    CHECK(b.fit.two_scale->l_outer == doctest::Approx(10.0).epsilon(0.15));
    CHECK_THROWS_AS(detect_nonexponential(d, NonexponentialOptions{.bin_width = 0}), std::invalid_argument);
}

TEST_CASE("saturation check") {
    std::vector<EnergyRecord> constant;
    for (int k = 0; k <= 100; ++k) constant.push_back({k, 3.0});
    const auto c = saturation_check(constant, {10, 20}, {80, 90});
    CHECK(c.saturated);
    CHECK(c.ratio == 1.0);

    std::vector<EnergyRecord> linear;
    for (int k = 0; k <= 100; ++k) linear.push_back({k, static_cast<double>(k)});
    const auto l = saturation_check(linear, {10, 20}, {80, 90});
    CHECK_FALSE(l.saturated);
    CHECK(l.ratio == doctest::Approx(85.0 / 15.0));

    CHECK_THROWS_AS(saturation_check(linear, {200, 300}, {10, 20}), std::invalid_argument);
}

TEST_CASE("power law exponent") {
    std::vector<double> x, y;
    for (double v = 1; v < 1000; v *= 2) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, 1.7));
    }
    CHECK(power_law_exponent(x, y) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_THROWS_AS(power_law_exponent(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("maximum probability ratio") {
    const auto wide = exponential(256, 50.0), narrow = exponential(256, 5.0);
    const double r = max_probability_ratio(wide, narrow);
    // The largest ratio sits at the outermost |m| where the narrow line is above the floor.
    CHECK(r > 1e6);
    CHECK(max_probability_ratio(narrow, narrow) == doctest::Approx(1.0));
    CHECK_THROWS_AS(max_probability_ratio(wide, exponential(128, 5.0)), std::invalid_argument);
}
