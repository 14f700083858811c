#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "dorlicz/error.hpp"
#include "dorlicz/sphgrid.hpp"

using namespace dorlicz;
constexpr double kPi = std::numbers::pi;

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
    CHECK(sphere_measure(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-15));
}

TEST_CASE("four-node circle grid") {
    const auto g = build_grid(2, 4, GridScheme::UniformAngle);
    REQUIRE(g->size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(g->weight(i) == doctest::Approx(kPi / 2.0));
        CHECK(g->angle(i) == doctest::Approx(i * kPi / 2.0));
    }
    CHECK(g->node(1)[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g->node(1)[1] == doctest::Approx(1.0));
}

TEST_CASE("weights sum to the sphere measure") {
    struct Case { int n, res; GridScheme s; std::optional<std::uint64_t> seed; };
    for (const auto& c : {Case{2, 512, GridScheme::UniformAngle, {}}, Case{3, 20000, GridScheme::Fibonacci, {}},
                          Case{4, 3000, GridScheme::MonteCarlo, 7}, Case{5, 1000, GridScheme::MonteCarlo, 3}}) {
        const auto g = build_grid(c.n, c.res, c.s, c.seed);
        double sum = 0.0;
        for (double w : g->weights()) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(std::abs(sum - sphere_measure(c.n)) / sphere_measure(c.n) <= 1e-12);
        for (std::size_t i = 0; i < g->size(); ++i) {
            double len = 0.0;
            for (double x : g->node(i)) len += x * x;
            CHECK(std::abs(std::sqrt(len) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(build_grid(1, 16, GridScheme::MonteCarlo, 1), ConfigError);
    CHECK_THROWS_AS(build_grid(3, 16, GridScheme::UniformAngle), ConfigError);
    CHECK_THROWS_AS(build_grid(2, 16, GridScheme::Fibonacci), ConfigError);
    CHECK_THROWS_AS(build_grid(4, 16, GridScheme::MonteCarlo), ConfigError);
    CHECK_THROWS_AS(build_grid(2, 3, GridScheme::UniformAngle), ConfigError);
    CHECK_THROWS_AS(parse_grid_scheme("lebedev"), ConfigError);
}

TEST_CASE("monte carlo grids are deterministic per seed") {
    const auto a = build_grid(4, 100, GridScheme::MonteCarlo, 11);
    const auto b = build_grid(4, 100, GridScheme::MonteCarlo, 11);
    const auto c = build_grid(4, 100, GridScheme::MonteCarlo, 12);
    CHECK(std::equal(a->flat_nodes().begin(), a->flat_nodes().end(), b->flat_nodes().begin()));
    CHECK(a->digest() == b->digest());
    CHECK(a->digest() != c->digest());
}

TEST_CASE("integration of simple functions") {
    const auto circle = build_grid(2, 64, GridScheme::UniformAngle);
    std::vector<double> one(circle->size(), 1.0);
    CHECK(integrate(*circle, one) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(integrate(*circle, one) / 2.0 == doctest::Approx(kPi).epsilon(1e-14));

    const auto sphere = build_grid(3, 20000, GridScheme::Fibonacci);
    std::vector<double> u1sq(sphere->size());
    for (std::size_t i = 0; i < sphere->size(); ++i) u1sq[i] = sphere->node(i)[0] * sphere->node(i)[0];
    CHECK(integrate(*sphere, u1sq) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-3));
}

TEST_CASE("non-finite values report the node") {
    const auto g = build_grid(2, 8, GridScheme::UniformAngle);
    std::vector<double> f(8, 1.0);
    f[5] = std::nan("");
    try {
        (void)integrate(*g, f);
        FAIL("expected a throw");
    } catch (const NumericalDomainError& e) {
        CHECK(e.node() == 5);
    }
    CHECK_THROWS_AS(GridFunction(g, f), NumericalDomainError);
    CHECK_THROWS_AS(GridFunction(g, std::vector<double>(7, 1.0)), ConfigError);
}

TEST_CASE("trapezoid convergence on the circle") {
    // f = 1 / (2 - cos(theta)), exact integral 2 pi / sqrt(3).
    const double exact = 2.0 * kPi / std::sqrt(3.0);
    double prev = 1.0;
    for (int res : {8, 16, 32}) {
        const auto g = build_grid(2, res, GridScheme::UniformAngle);
        std::vector<double> f(g->size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 / (2.0 - g->node(i)[0]);
        const double err = std::abs(integrate(*g, f) - exact);
        CHECK(err * 4.0 <= prev + 1e-15);
        prev = err;
    }
}

TEST_CASE("fibonacci error does not grow with resolution") {
    auto err = [](int res) {
        const auto g = build_grid(3, res, GridScheme::Fibonacci);
        std::vector<double> f(g->size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(g->node(i)[2]);
        return std::abs(integrate(*g, f) - 2.0 * kPi * (std::exp(1.0) - std::exp(-1.0)));
    };
    CHECK(err(2000) <= err(1000) * 1.0001);
    CHECK(err(4000) <= err(2000) * 1.0001);
}

TEST_CASE("rotation by a grid symmetry leaves the integral unchanged") {
    const auto g = build_grid(2, 32, GridScheme::UniformAngle);
    std::vector<double> f(32), fr(32);
    for (std::size_t i = 0; i < 32; ++i) {
        f[i] = std::exp(g->node(i)[0]) + g->node(i)[1];
        fr[i] = std::exp(g->node((i + 5) % 32)[0]) + g->node((i + 5) % 32)[1];
    }
    CHECK(integrate(*g, f) == doctest::Approx(integrate(*g, fr)).epsilon(1e-14));
}

TEST_CASE("coarsen halves the resolution") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    const auto c = coarsen(*g);
    CHECK(c->size() == 256);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(c->node(i)[0] == doctest::Approx(g->node(2 * i)[0]));
}
