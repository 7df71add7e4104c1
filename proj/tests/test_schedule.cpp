#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "pndm/analysis.hpp"
#include "pndm/schedule.hpp"

using namespace pndm;

TEST_CASE("toy-linear alpha_bar is 1 - t") {
    const Schedule s = Schedule::toy_linear();
    CHECK(s.alpha_bar(0.25) == 0.75);
    CHECK(s.alpha_bar(0.0) == 1.0);
    CHECK(s.alpha_bar(1.0) == 0.0);
}

TEST_CASE("continuous kinds start at alpha_bar(0) = 1") {
    CHECK(Schedule::toy_linear().alpha_bar(0.0) == 1.0);
    CHECK(Schedule::exponential(-1.0, -0.5).alpha_bar(0.0) == 1.0);
    CHECK(Schedule::cosine().alpha_bar(0.0) == 1.0);
    CHECK(Schedule::linear_beta(1e-4, 0.02, 1000).alpha_bar(0.0) == 1.0);
}

TEST_CASE("linear-beta matches an independent running product") {
    const int n = 1000;
    const double beta_start = 1e-4, beta_end = 0.02;
    const Schedule s = Schedule::linear_beta(beta_start, beta_end, n);

    // Brute-force product over the independently rebuilt beta grid.
    double prod = 1.0;
    for (int i = 1; i <= 2; ++i)
        prod *= 1.0 - (beta_start + (beta_end - beta_start) * (i - 1) / (n - 1));
    CHECK(s.alpha_bar_at_step(2) == doctest::Approx(prod).epsilon(1e-15));

    // Grid-knot queries through the continuous form are exact.
    for (int i : {0, 1, 2, 17, 500, 999, 1000})
        CHECK(s.alpha_bar(static_cast<double>(i) / n) == s.alpha_bar_at_step(i));
}

TEST_CASE("alpha_bar derivatives") {
    SUBCASE("toy-linear is -1 everywhere") {
        const Schedule s = Schedule::toy_linear();
        CHECK(s.alpha_bar_derivative(0.1) == -1.0);
        CHECK(s.alpha_bar_derivative(0.999) == -1.0);
    }
    SUBCASE("exponential is analytic") {
        const Schedule s = Schedule::exponential(0.0, -1.0);
        CHECK(s.alpha_bar_derivative(0.5) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-15));
    }
    SUBCASE("linear-beta central difference tracks the interpolant slope") {
        const Schedule s = Schedule::linear_beta(1e-4, 0.02, 1000);
        // 5-point stencil at h/10 as the higher-order reference.
        const double t = 0.5 + 0.5e-3;  // mid segment
        const double h = Schedule::fd_step() / 10.0;
        const auto f = [&](double u) { return s.alpha_bar(u); };
        const double ref =
            (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
        CHECK(s.alpha_bar_derivative(t) == doctest::Approx(ref).epsilon(1e-6));
    }
    SUBCASE("finite-difference kinds reject the boundary") {
        CHECK_THROWS_AS(Schedule::cosine().alpha_bar_derivative(0.0), std::domain_error);
        CHECK_THROWS_AS(Schedule::linear_beta(1e-4, 0.02, 100).alpha_bar_derivative(1.0),
                        std::domain_error);
    }
}

TEST_CASE("alpha_bar rejects times outside [0, 1]") {
    const Schedule s = Schedule::toy_linear();
    CHECK_THROWS_AS(s.alpha_bar(-0.1), std::domain_error);
    CHECK_THROWS_AS(s.alpha_bar(1.1), std::domain_error);
}

TEST_CASE("alpha_bar is strictly decreasing for every kind") {
    const Schedule kinds[] = {Schedule::toy_linear(), Schedule::cosine(),
                              Schedule::exponential(-0.5, -1.0),
                              Schedule::linear_beta(1e-4, 0.02, 1000)};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(1e-6, 1.0 - 1e-6);
    for (const Schedule& s : kinds) {
        for (int k = 0; k < 1000; ++k) {
            double t1 = uni(rng), t2 = uni(rng);
            if (t1 == t2) continue;
            if (t1 > t2) std::swap(t1, t2);
            CHECK(s.alpha_bar(t1) > s.alpha_bar(t2));
        }
    }
}

TEST_CASE("exponential noise coefficient blows up like 1/sqrt(t) only when b != 0") {
    const Schedule s = Schedule::exponential(0.0, -1.0);
    std::vector<std::array<double, 2>> points;
    for (double t = 1e-2; t >= 1e-6 * 0.999; t /= 2.0) {
        const double coeff =
            std::abs(s.alpha_bar_derivative(t) / s.alpha_bar(t)) / std::sqrt(1.0 - s.alpha_bar(t));
        points.push_back({t, coeff});
    }
    const double slope = fit_loglog_slope(points);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("schedule constructors validate parameters") {
    CHECK_THROWS_AS(Schedule::linear_beta(0.0, 0.02, 100), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::linear_beta(1e-4, 1.5, 100), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::exponential(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::exponential(1.0, -0.5), std::invalid_argument);  // rises near t=1
}

TEST_CASE("time grids") {
    const Schedule s = Schedule::toy_linear();
    SUBCASE("uniform spacing, endpoints exact") {
        const TimeGrid g = make_time_grid(s, 4, 1.0, 0.0);
        REQUIRE(g.values.size() == 5);
        CHECK(g.values == std::vector<double>{1.0, 0.75, 0.5, 0.25, 0.0});
    }
    SUBCASE("single step") {
        const TimeGrid g = make_time_grid(s, 1, 1.0, 0.0);
        CHECK(g.values == std::vector<double>{1.0, 0.0});
    }
    SUBCASE("gaps are uniform") {
        const TimeGrid g = make_time_grid(s, 10, 0.9, 0.1);
        REQUIRE(g.values.size() == 11);
        for (std::size_t i = 1; i < g.values.size(); ++i)
            CHECK(g.values[i - 1] - g.values[i] == doctest::Approx(0.08).epsilon(1e-12));
        CHECK(g.is_uniform());
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(make_time_grid(s, 0, 1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(make_time_grid(s, 4, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(make_time_grid(s, 4, 0.5, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(make_time_grid(s, 4, 0.5, -0.1), std::invalid_argument);
    }
}
