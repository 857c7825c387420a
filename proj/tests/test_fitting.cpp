#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spectool/fitting.hpp"
#include "spectool/gaussmodel.hpp"

#include <cmath>
#include <random>

using namespace spectool;

namespace {

core::Spectrum synth_ple_raw(const std::vector<std::array<double, 3>>& comps,
                             double noise_amp = 0.0, unsigned seed = 0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> nm, inten;
    for (int l = 430; l <= 530; ++l) {
        nm.push_back(static_cast<double>(l));
        double v = 0.0;
        for (const auto& [a, mu, sg] : comps)
            v += gaussmodel::gauss(a, mu, sg, core::wavelength_to_energy(static_cast<double>(l)));
        if (noise_amp > 0.0) v = std::max(v + noise_amp * u(gen), 0.0);
        inten.push_back(v);
    }
    return core::Spectrum(std::move(nm), std::move(inten), core::AxisUnit::Nanometer);
}

core::Spectrum synth_pl(double zpl, const double amps[5], const double sigmas[5]) {
    const double det[5] = {0.0, 0.020, 0.050, 0.165, 0.190};
    std::vector<double> ev, inten;
    for (double e = zpl - 0.35; e <= zpl + 0.06; e += 0.001) {
        ev.push_back(e);
        double v = 0.0;
        for (int k = 0; k < 5; ++k) v += gaussmodel::gauss(amps[k], zpl - det[k], sigmas[k], e);
        inten.push_back(v);
    }
    return core::normalize(core::Spectrum(std::move(ev), std::move(inten)));
}

}  // namespace

TEST_CASE("three-gaussian fit recovers centers to 0.5 meV, noiseless") {
    const std::vector<std::array<double, 3>> truth = {
        {1.0, 2.45, 0.015}, {0.6, 2.61, 0.015}, {0.35, 2.77, 0.015}};
    auto analysis = fitting::analyze_ple(synth_ple_raw(truth));
    REQUIRE(analysis.ok);
    CHECK(analysis.fit.converged);
    auto ts = fitting::extract_transitions(analysis.fit, analysis.fitted);
    REQUIRE(ts.transitions.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(ts.transitions[k] - truth[k][1]) < 0.0005);
}

TEST_CASE("single exact gaussian leaves residuals below 1e-6") {
    auto analysis = fitting::analyze_ple(synth_ple_raw({{0.8, 2.6, 0.02}}));
    REQUIRE(analysis.ok);
    CHECK(analysis.fit.max_abs_residual < 1e-6);
}

TEST_CASE("three-gaussian fit with 0.03 uniform noise stays within 3 meV") {
    const std::vector<std::array<double, 3>> truth = {
        {1.0, 2.45, 0.015}, {0.6, 2.61, 0.015}, {0.35, 2.77, 0.015}};
    auto analysis = fitting::analyze_ple(synth_ple_raw(truth, 0.03, 42));
    REQUIRE(analysis.ok);
    auto ts = fitting::extract_transitions(analysis.fit, analysis.fitted);
    REQUIRE(ts.transitions.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(ts.transitions[k] - truth[k][1]) < 0.003);
    CHECK(analysis.fit.max_abs_residual < 0.26);
}

TEST_CASE("multi-gauss model equals the sum of its components") {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> ua(0.1, 1.0), um(2.3, 2.9), us(0.01, 0.05);
    std::vector<double> params;
    for (int k = 0; k < 4; ++k) {
        params.push_back(ua(gen));
        params.push_back(um(gen));
        params.push_back(us(gen));
    }
    for (double x = 2.3; x <= 2.9; x += 0.013) {
        double parts = 0.0;
        for (int k = 0; k < 4; ++k)
            parts += gaussmodel::gauss(params[3 * k], params[3 * k + 1], params[3 * k + 2], x);
        CHECK(std::abs(gaussmodel::multi_gauss_value(params, x) - parts) <= 1e-12);
    }
}

TEST_CASE("extract_zpl") {
    SUBCASE("peak at 575 nm lands at 2.156 eV") {
        std::vector<double> nm, inten;
        for (int l = 550; l <= 600; ++l) {
            nm.push_back(l);
            inten.push_back(gaussmodel::gauss(100.0, core::wavelength_to_energy(575.0), 0.01,
                                              core::wavelength_to_energy(l)));
        }
        core::Spectrum pl(nm, inten, core::AxisUnit::Nanometer);
        CHECK(fitting::extract_zpl(pl) == doctest::Approx(2.156).epsilon(0.001));
    }
    SUBCASE("tie breaks toward the lower energy") {
        core::Spectrum s({2.0, 2.1, 2.2, 2.3, 2.4}, {0.0, 1.0, 0.0, 1.0, 0.0});
        CHECK(fitting::extract_zpl(s) == doctest::Approx(2.1));
    }
    SUBCASE("monotone spectrum gives the boundary") {
        core::Spectrum s({2.0, 2.1, 2.2}, {1.0, 2.0, 3.0});
        CHECK(fitting::extract_zpl(s) == doctest::Approx(2.2));
    }
    SUBCASE("invariant under positive intensity scaling") {
        std::mt19937 gen(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> ax(40), in(40);
        for (int i = 0; i < 40; ++i) {
            ax[i] = 2.0 + 0.01 * i;
            in[i] = u(gen);
        }
        core::Spectrum a(ax, in);
        for (double& v : in) v *= 37.5;
        core::Spectrum b(ax, in);
        CHECK(fitting::extract_zpl(a) == fitting::extract_zpl(b));
    }
}

TEST_CASE("pl decomposition recovers the five detunings within 5 meV") {
    const double zpl = 2.156;
    const double amps[5] = {1.0, 0.30, 0.25, 0.35, 0.20};
    const double sigmas[5] = {0.010, 0.012, 0.025, 0.018, 0.018};
    auto pl = synth_pl(zpl, amps, sigmas);
    auto dec = fitting::decompose_pl(pl, zpl);
    CHECK(dec.converged);
    CHECK(std::abs((zpl - dec.zpl.center) - 0.000) < 0.005);
    CHECK(std::abs((zpl - dec.acoustic[0].center) - 0.020) < 0.005);
    CHECK(std::abs((zpl - dec.acoustic[1].center) - 0.050) < 0.005);
    CHECK(std::abs((zpl - dec.optical[0].center) - 0.165) < 0.005);
    CHECK(std::abs((zpl - dec.optical[1].center) - 0.190) < 0.005);
    // sideband geometry invariants
    CHECK(dec.optical[0].center < dec.zpl.center);
    CHECK(dec.optical[1].center < dec.zpl.center);
    CHECK(dec.debye_waller_proxy > 0.0);
    CHECK(dec.debye_waller_proxy <= 1.0);
}

TEST_CASE("zpl-only spectrum gives debye-waller proxy 1") {
    const double zpl = 2.156;
    const double amps[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
    const double sigmas[5] = {0.010, 0.012, 0.025, 0.018, 0.018};
    auto pl = synth_pl(zpl, amps, sigmas);
    lsq::FitOptions tight;
    tight.max_iter = 500;
    tight.tol_cost = 1e-16;
    tight.tol_step = 1e-16;
    auto dec = fitting::decompose_pl(pl, zpl, tight);
    CHECK(dec.debye_waller_proxy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("equal-area zpl and sideband give proxy one half") {
    const double zpl = 2.156;
    // optical sideband area A*sigma matches the ZPL area exactly
    const double amps[5] = {1.0, 0.0, 0.0, 0.5, 0.0};
    const double sigmas[5] = {0.010, 0.012, 0.025, 0.020, 0.018};
    auto pl = synth_pl(zpl, amps, sigmas);
    lsq::FitOptions tight;
    tight.max_iter = 500;
    tight.tol_cost = 1e-16;
    tight.tol_step = 1e-16;
    auto dec = fitting::decompose_pl(pl, zpl, tight);
    CHECK(dec.debye_waller_proxy == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("decomposition is a fixed point on its own model") {
    const double zpl = 2.156;
    const double amps[5] = {1.0, 0.30, 0.25, 0.35, 0.20};
    const double sigmas[5] = {0.010, 0.012, 0.025, 0.018, 0.018};
    auto dec = fitting::decompose_pl(synth_pl(zpl, amps, sigmas), zpl);
    REQUIRE(dec.converged);

    // rebuild a spectrum from the recovered components and refit
    const fitting::GaussianComponent comps[5] = {dec.zpl, dec.acoustic[0], dec.acoustic[1],
                                                 dec.optical[0], dec.optical[1]};
    std::vector<double> ev, inten;
    for (double e = zpl - 0.35; e <= zpl + 0.06; e += 0.001) {
        ev.push_back(e);
        double v = 0.0;
        for (const auto& c : comps) v += gaussmodel::gauss(c.amplitude, c.center, c.sigma, e);
        inten.push_back(v);
    }
    auto dec2 = fitting::decompose_pl(core::normalize(core::Spectrum(ev, inten)), zpl);
    CHECK(dec2.max_abs_residual < 1e-6);
}

TEST_CASE("decompose_pl rejects a zpl outside the spectrum") {
    const double amps[5] = {1.0, 0.1, 0.1, 0.1, 0.1};
    const double sigmas[5] = {0.010, 0.012, 0.025, 0.018, 0.018};
    auto pl = synth_pl(2.156, amps, sigmas);
    CHECK_THROWS_AS(fitting::decompose_pl(pl, 3.5), std::invalid_argument);
}

TEST_CASE("extract_transitions") {
    auto make_fit = [](const std::vector<double>& centers, const std::vector<bool>& edge) {
        fitting::MultiGaussFit fit;
        std::vector<peaks::PeakCandidate> cands;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            fit.components.push_back({0.5, centers[i], 0.015});
            fit.source_candidates.push_back(static_cast<int>(i));
            peaks::PeakCandidate c;
            c.index = static_cast<int>(i);
            c.position = centers[i];
            c.is_edge = edge[i];
            c.accepted = !edge[i];
            cands.push_back(c);
        }
        fit.converged = true;
        return std::make_pair(fit, cands);
    };

    SUBCASE("165 meV ladder") {
        auto [fit, cands] = make_fit({2.490, 2.655, 2.820}, {false, false, false});
        auto ts = fitting::extract_transitions(fit, cands, 7, 2.156);
        CHECK(ts.emitter_id == 7);
        REQUIRE(ts.pairwise_diffs.size() == 3);
        CHECK(ts.pairwise_diffs[0] == doctest::Approx(0.165));
        CHECK(ts.pairwise_diffs[1] == doctest::Approx(0.330));
        CHECK(ts.pairwise_diffs[2] == doctest::Approx(0.165));
    }
    SUBCASE("single transition has no diffs") {
        auto [fit, cands] = make_fit({2.5}, {false});
        CHECK(fitting::extract_transitions(fit, cands).pairwise_diffs.empty());
    }
    SUBCASE("edge exclusion empties the pair list") {
        auto [fit, cands] = make_fit({2.4, 2.86}, {false, true});
        auto ts = fitting::extract_transitions(fit, cands);
        CHECK(ts.transitions.size() == 1);
        CHECK(ts.pairwise_diffs.empty());
    }
    SUBCASE("pairwise diffs invariant under translation") {
        auto [fit, cands] = make_fit({2.45, 2.60, 2.83}, {false, false, false});
        auto [fit2, cands2] = make_fit({2.46, 2.61, 2.84}, {false, false, false});
        auto a = fitting::extract_transitions(fit, cands);
        auto b = fitting::extract_transitions(fit2, cands2);
        REQUIRE(a.pairwise_diffs.size() == b.pairwise_diffs.size());
        for (std::size_t i = 0; i < a.pairwise_diffs.size(); ++i)
            CHECK(a.pairwise_diffs[i] == doctest::Approx(b.pairwise_diffs[i]).epsilon(1e-9));
    }
}
