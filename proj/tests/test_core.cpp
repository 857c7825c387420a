#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spectool/core.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace spectool;

TEST_CASE("wavelength to energy conversion") {
    CHECK(core::wavelength_to_energy(575.0) == doctest::Approx(2.156).epsilon(0.0005));
    CHECK(core::wavelength_to_energy(1239.841984) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(core::wavelength_to_energy(530.0) == doctest::Approx(2.3393).epsilon(1e-4));
    CHECK(core::wavelength_to_energy(430.0) == doctest::Approx(2.8833).epsilon(1e-4));
    CHECK_THROWS_AS(core::wavelength_to_energy(0.0), std::domain_error);
    CHECK_THROWS_AS(core::wavelength_to_energy(-5.0), std::domain_error);
}

TEST_CASE("conversion round trip within 1e-12 relative") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> lam(100.0, 2000.0);
    for (int i = 0; i < 200; ++i) {
        const double l = lam(gen);
        const double back = core::energy_to_wavelength(core::wavelength_to_energy(l));
        CHECK(std::abs(back - l) / l < 1e-12);
    }
}

TEST_CASE("wavelength_to_energy strictly decreasing") {
    double prev = core::wavelength_to_energy(100.0);
    for (double l = 101.0; l < 1000.0; l += 7.3) {
        const double e = core::wavelength_to_energy(l);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("normalize divides by max") {
    core::Spectrum s({1.0, 2.0, 3.0}, {2.0, 4.0, 8.0});
    auto n = core::normalize(s);
    CHECK(n.intensities[0] == doctest::Approx(0.25));
    CHECK(n.intensities[1] == doctest::Approx(0.5));
    CHECK(n.intensities[2] == 1.0);
    CHECK(n.kind == core::IntensityKind::Normalized);

    SUBCASE("idempotent") {
        auto n2 = core::normalize(n);
        for (std::size_t i = 0; i < n.size(); ++i) CHECK(n2.intensities[i] == n.intensities[i]);
    }
    SUBCASE("constant spectrum") {
        auto c = core::normalize(core::Spectrum({1.0, 2.0, 3.0}, {5.0, 5.0, 5.0}));
        for (double v : c.intensities) CHECK(v == 1.0);
    }
    SUBCASE("degenerate input") {
        CHECK_THROWS_AS(core::normalize(core::Spectrum({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0})),
                        std::domain_error);
        CHECK_THROWS_AS(core::normalize(core::Spectrum({1.0, 2.0, 3.0}, {-3.0, -2.0, -1.0})),
                        std::domain_error);
    }
}

TEST_CASE("spectrum invariants") {
    CHECK_THROWS_AS(core::Spectrum({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(core::Spectrum({1.0, 1.0, 2.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(core::Spectrum({1.0, 2.0, 3.0}, {1.0, 2.0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(core::Spectrum({1.0, 2.0, 3.0}, {1.0, inf, 2.0}), std::invalid_argument);
}

TEST_CASE("to_energy converts and re-sorts") {
    core::Spectrum nm({430.0, 480.0, 530.0}, {1.0, 2.0, 3.0}, core::AxisUnit::Nanometer);
    auto ev = core::to_energy(nm);
    CHECK(ev.unit == core::AxisUnit::ElectronVolt);
    CHECK(ev.axis[0] == doctest::Approx(core::wavelength_to_energy(530.0)));
    CHECK(ev.axis[2] == doctest::Approx(core::wavelength_to_energy(430.0)));
    // intensities travel with their axis points
    CHECK(ev.intensities[0] == 3.0);
    CHECK(ev.intensities[2] == 1.0);
    // already in eV: unchanged
    auto ev2 = core::to_energy(ev);
    CHECK(ev2.axis == ev.axis);
}

TEST_CASE("rebin_trace sums groups and drops the partial tail") {
    SUBCASE("50 bins of 10 ms into one 500 ms bin") {
        std::vector<std::int64_t> counts(50);
        std::iota(counts.begin(), counts.end(), 1);
        auto out = core::rebin_trace(core::CountTrace(0.010, counts), 0.500);
        REQUIRE(out.counts.size() == 1);
        CHECK(out.counts[0] == 50 * 51 / 2);
        CHECK(out.bin_width_s == doctest::Approx(0.5));
    }
    SUBCASE("identity when target equals source") {
        core::CountTrace t(0.010, {1, 2, 3});
        auto out = core::rebin_trace(t, 0.010);
        CHECK(out.counts == t.counts);
    }
    SUBCASE("103 bins -> 2 groups, 3 dropped") {
        std::vector<std::int64_t> counts(103, 1);
        auto out = core::rebin_trace(core::CountTrace(0.010, counts), 0.500);
        REQUIRE(out.counts.size() == 2);
        CHECK(out.counts[0] == 50);
        CHECK(out.counts[1] == 50);
    }
    SUBCASE("non-multiple target rejected") {
        core::CountTrace t(0.010, {1, 2, 3});
        CHECK_THROWS_AS(core::rebin_trace(t, 0.015), std::invalid_argument);
    }
}

TEST_CASE("rebin conserves counts minus the dropped remainder") {
    std::mt19937 gen(11);
    std::uniform_int_distribution<int> len(1, 400);
    std::uniform_int_distribution<int> cnt(0, 1000);
    std::uniform_int_distribution<int> mult(1, 9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(len(gen)));
        for (auto& c : counts) c = cnt(gen);
        const int k = mult(gen);
        core::CountTrace t(0.01, counts);
        auto out = core::rebin_trace(t, 0.01 * k);
        std::int64_t kept = 0;
        const std::size_t full = (counts.size() / static_cast<std::size_t>(k)) * k;
        for (std::size_t i = 0; i < full; ++i) kept += counts[i];
        std::int64_t got = 0;
        for (auto c : out.counts) got += c;
        CHECK(got == kept);
    }
}

TEST_CASE("mean_abs_diff") {
    CHECK(core::mean_abs_diff(std::vector<double>{1, 1, 1, 1}) == 0.0);
    CHECK(core::mean_abs_diff(std::vector<double>{0, 1, 0, 1}) == 1.0);
    CHECK(core::mean_abs_diff(std::vector<double>{0.0, 0.5, 0.3}) == doctest::Approx(0.35));
    CHECK_THROWS_AS(core::mean_abs_diff(std::vector<double>{1.0}), std::invalid_argument);

    SUBCASE("invariant under adding a constant") {
        std::mt19937 gen(3);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<double> v(20), w(20);
            const double c = u(gen) * 10.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = u(gen);
                w[i] = v[i] + c;
            }
            CHECK(core::mean_abs_diff(v) == doctest::Approx(core::mean_abs_diff(w)).epsilon(1e-12));
        }
    }
}

TEST_CASE("count trace and g2 invariants") {
    CHECK_THROWS_AS(core::CountTrace(0.0, {1}), std::invalid_argument);
    CHECK_THROWS_AS(core::CountTrace(0.1, {-1}), std::invalid_argument);
    CHECK_THROWS_AS(core::G2Histogram(2e-10, {-1e-9, 0.0, 1e-9}, {1.0, -2.0, 1.0}),
                    std::invalid_argument);
    // asymmetric delays rejected
    CHECK_THROWS_AS(core::G2Histogram(2e-10, {-1e-9, 0.0, 5e-9}, {1.0, 2.0, 1.0}),
                    std::invalid_argument);
    CHECK_NOTHROW(core::G2Histogram(2e-10, {-1e-9, 0.0, 1e-9}, {1.0, 2.0, 1.0}));
}
