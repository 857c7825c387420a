#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spectool/gaussmodel.hpp"
#include "spectool/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace spectool;

namespace {

lsq::FitProblem linear_problem() {
    lsq::FitProblem p;
    p.model = [](std::span<const double> a, double x) { return a[0] * x + a[1]; };
    for (int i = 0; i < 20; ++i) {
        const double x = 0.3 * i;
        p.x_data.push_back(x);
        p.y_data.push_back(2.0 * x + 1.0);
    }
    p.initial_params = {0.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("exact linear data recovers slope and intercept") {
    auto res = lsq::fit(linear_problem());
    CHECK(res.converged);
    CHECK(res.params[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(res.params[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.cost < 1e-12);
}

TEST_CASE("single gaussian recovery from perturbed init, noiseless") {
    const double a = 1.0, mu = 2.5, sg = 0.02;
    lsq::FitProblem p;
    p.model = gaussmodel::multi_gauss_value;
    p.jacobian = gaussmodel::multi_gauss_jacobian_row;
    for (int i = 0; i <= 100; ++i) {
        const double x = 2.3 + 0.004 * i;
        p.x_data.push_back(x);
        p.y_data.push_back(gaussmodel::gauss(a, mu, sg, x));
    }
    p.initial_params = {a * 1.2, mu * 0.999, sg * 0.8};  // +-20 % style perturbation
    p.bounds = {lsq::Bounds{0.0, 1e9}, std::nullopt, lsq::Bounds{1e-6, 1e9}};
    auto res = lsq::fit(p);
    CHECK(res.converged);
    CHECK(std::abs(res.params[0] - a) / a < 1e-6);
    CHECK(std::abs(res.params[1] - mu) / mu < 1e-6);
    CHECK(std::abs(res.params[2] - sg) / sg < 1e-6);
}

TEST_CASE("zero-variance data with constant model converges immediately") {
    lsq::FitProblem p;
    p.model = [](std::span<const double> a, double) { return a[0]; };
    p.x_data = {0.0, 1.0, 2.0};
    p.y_data = {4.0, 4.0, 4.0};
    p.initial_params = {4.0};
    auto res = lsq::fit(p);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    for (double r : res.residuals) CHECK(r == 0.0);
}

TEST_CASE("cost is monotone non-increasing across accepted iterations") {
    lsq::FitProblem p;
    p.model = gaussmodel::multi_gauss_value;
    p.jacobian = gaussmodel::multi_gauss_jacobian_row;
    std::mt19937 gen(5);
    std::normal_distribution<double> noise(0.0, 0.02);
    for (int i = 0; i <= 80; ++i) {
        const double x = 0.01 * i;
        p.x_data.push_back(x);
        p.y_data.push_back(gaussmodel::gauss(0.8, 0.4, 0.05, x) + noise(gen));
    }
    p.initial_params = {0.3, 0.55, 0.12};
    auto res = lsq::fit(p);
    REQUIRE(res.cost_history.size() >= 2);
    for (std::size_t i = 1; i < res.cost_history.size(); ++i)
        CHECK(res.cost_history[i] <= res.cost_history[i - 1]);
    // FitResult invariant: cost equals the residual sum of squares
    double ss = 0.0;
    for (double r : res.residuals) ss += r * r;
    CHECK(res.cost == doctest::Approx(ss).epsilon(1e-10));
}

TEST_CASE("analytic jacobian matches central differences for the gaussian model") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> ua(0.1, 1.0), um(2.3, 2.9), us(0.005, 0.05),
        ut(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> params = {ua(gen), um(gen), us(gen), ua(gen), um(gen), us(gen)};
        // evaluate near a component center, where the partials carry weight
        const std::size_t pick = 3 * (gen() % 2);
        const double x = params[pick + 1] + ut(gen) * params[pick + 2];
        std::vector<double> analytic(params.size());
        gaussmodel::multi_gauss_jacobian_row(params, x, analytic);
        double row_scale = 0.0;
        for (double a : analytic) row_scale = std::max(row_scale, std::abs(a));
        for (std::size_t j = 0; j < params.size(); ++j) {
            const double h = 1e-6 * std::max(std::abs(params[j]), 1e-3);
            auto pp = params;
            pp[j] += h;
            const double fp = gaussmodel::multi_gauss_value(pp, x);
            pp[j] -= 2 * h;
            const double fm = gaussmodel::multi_gauss_value(pp, x);
            const double fd = (fp - fm) / (2 * h);
            // relative where the entry is significant; the finite-difference
            // noise floor caps what tiny entries can certify
            const double scale = std::max({std::abs(analytic[j]), std::abs(fd), 1e-3 * row_scale});
            CHECK(std::abs(analytic[j] - fd) / scale < 1e-4);
        }
    }
}

TEST_CASE("fit invariant under data reordering") {
    lsq::FitProblem p;
    p.model = gaussmodel::multi_gauss_value;
    p.jacobian = gaussmodel::multi_gauss_jacobian_row;
    std::mt19937 gen(23);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int i = 0; i <= 60; ++i) {
        const double x = 2.3 + 0.01 * i;
        p.x_data.push_back(x);
        p.y_data.push_back(gaussmodel::gauss(0.7, 2.6, 0.04, x) + noise(gen));
    }
    p.initial_params = {0.5, 2.58, 0.05};
    auto res1 = lsq::fit(p);

    std::vector<std::size_t> order(p.x_data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    lsq::FitProblem q = p;
    for (std::size_t i = 0; i < order.size(); ++i) {
        q.x_data[i] = p.x_data[order[i]];
        q.y_data[i] = p.y_data[order[i]];
    }
    auto res2 = lsq::fit(q);
    for (std::size_t j = 0; j < res1.params.size(); ++j)
        CHECK(res1.params[j] == doctest::Approx(res2.params[j]).epsilon(1e-6));
}

TEST_CASE("bounds are enforced by projection") {
    lsq::FitProblem p;
    p.model = [](std::span<const double> a, double x) { return a[0] * x; };
    p.x_data = {0.0, 1.0, 2.0, 3.0};
    p.y_data = {0.0, 5.0, 10.0, 15.0};  // unconstrained optimum a = 5
    p.initial_params = {1.0};
    p.bounds = {lsq::Bounds{0.0, 2.0}};
    auto res = lsq::fit(p);
    CHECK(res.params[0] == doctest::Approx(2.0));
}

TEST_CASE("non-finite model at the start throws, mid-iteration aborts cleanly") {
    lsq::FitProblem p;
    p.model = [](std::span<const double> a, double x) { return std::log(a[0]) * x; };
    p.x_data = {1.0, 2.0, 3.0};
    p.y_data = {1.0, 2.0, 3.0};
    p.initial_params = {-1.0};  // log of a negative number
    CHECK_THROWS_AS(lsq::fit(p), std::domain_error);
}

TEST_CASE("argument validation") {
    lsq::FitProblem p;
    p.model = [](std::span<const double> a, double) { return a[0]; };
    p.x_data = {1.0};
    p.y_data = {1.0, 2.0};
    p.initial_params = {0.0};
    CHECK_THROWS_AS(lsq::fit(p), std::invalid_argument);
    p.y_data = {1.0};
    p.initial_params = {0.0, 0.0};  // more params than points
    CHECK_THROWS_AS(lsq::fit(p), std::invalid_argument);
}
