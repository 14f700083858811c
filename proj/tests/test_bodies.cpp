#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dorlicz/bodies.hpp"
#include "dorlicz/error.hpp"
#include "dorlicz/functionals.hpp"

using namespace dorlicz;
constexpr double kPi = std::numbers::pi;

namespace {

Vec dir2(double theta) {
    Vec u(2);
    u << std::cos(theta), std::sin(theta);
    return u;
}

Mat m2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

StarBody triangle(double start_deg) {
    std::vector<Facet> f;
    for (int k = 0; k < 3; ++k) f.push_back({dir2((start_deg + 120.0 * k) * kPi / 180.0), 0.5});
    return StarBody::polytope(2, f);
}

// Union of two equilateral triangles with circumradius 1.
StarBody star_of_david() {
    const StarBody up = triangle(270.0), down = triangle(90.0);
    return StarBody::from_function(
        2, [up, down](std::span<const double> u) { return std::max(up.radial(u), down.radial(u)); }, "star-of-david",
        Flag::Yes, Flag::No);
}

double sup_radial_distance(const StarBody& a, const StarBody& b, const GridPtr& g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(a.radial(g->node(i)) - b.radial(g->node(i))));
    return worst;
}

}  // namespace

TEST_CASE("radial values of analytic kinds") {
    const auto g = build_grid(2, 64, GridScheme::UniformAngle);
    for (double r : radial_values(StarBody::ball(2), g)) CHECK(r == 1.0);
    CHECK(StarBody::cube(2).radial(dir2(kPi / 4)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(StarBody::lp_ball(2, 1.0).radial(dir2(0.0)) == doctest::Approx(1.0));
    CHECK(StarBody::lp_ball(2, 1.0).radial(dir2(kPi / 4)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(StarBody::ellipsoid_axes({2.0, 0.5}).radial(dir2(0.0)) == doctest::Approx(2.0));
    CHECK(StarBody::ellipsoid_axes({2.0, 0.5}).radial(dir2(kPi / 2)) == doctest::Approx(0.5));
}

TEST_CASE("support values of analytic kinds") {
    const StarBody e = StarBody::ellipsoid_axes({2.0, 0.5});
    const StarBody sq = StarBody::cube(2);
    for (double t : {0.0, 0.3, 1.1, 2.5, 4.0}) {
        const Vec u = dir2(t);
        CHECK(StarBody::ball(2).support(u) == doctest::Approx(1.0));
        CHECK(e.support(u) == doctest::Approx(std::sqrt(4.0 * u[0] * u[0] + 0.25 * u[1] * u[1])));
        CHECK(sq.support(u) == doctest::Approx(std::abs(u[0]) + std::abs(u[1])));
    }
}

TEST_CASE("point-cloud support of a sampled body") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    const auto rho = radial_values(StarBody::cube(2), g);
    const StarBody sampled = StarBody::grid_sampled(g, rho, Flag::Yes, Flag::Yes);
    const auto h = support_values(sampled, g);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(h[i] == doctest::Approx(std::abs(g->node(i)[0]) + std::abs(g->node(i)[1])).epsilon(1e-12));
}

TEST_CASE("hull sweep matches brute force") {
    const auto g = build_grid(2, 256, GridScheme::UniformAngle);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const StarBody k = make_random_star(2, seed, 0.6, seed % 2 == 0);
        const auto rho = radial_values(k, g);
        const auto fast = point_cloud_support(*g, rho);
        for (std::size_t i = 0; i < g->size(); ++i)
            CHECK(fast[i] == doctest::Approx(point_cloud_support_at(*g, rho, g->node(i))).epsilon(1e-14));
    }
}

TEST_CASE("polar bodies") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    CHECK(polar(StarBody::ball(2, 4.0), g).ball_radius() == doctest::Approx(0.25));
    const StarBody ep = polar(StarBody::ellipsoid_axes({2.0, 0.5}), g);
    CHECK(ep.radial(dir2(0.0)) == doctest::Approx(0.5));
    CHECK(ep.radial(dir2(kPi / 2)) == doctest::Approx(2.0));
    const StarBody cross = polar(StarBody::cube(2), g);
    CHECK(cross.kind() == BodyKind::Polytope);
    const StarBody l1 = StarBody::lp_ball(2, 1.0);
    CHECK(sup_radial_distance(cross, l1, g) < 1e-12);
    CHECK(polar(StarBody::lp_ball(2, 3.0), g).lp_exponent() == doctest::Approx(1.5));
    CHECK(polar(StarBody::lp_ball(3, 0.5), build_grid(3, 100, GridScheme::Fibonacci)).lp_exponent() == INFINITY);
}

TEST_CASE("bipolar of convex bodies is the body") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    for (const StarBody& k : {StarBody::ellipsoid_axes({1.5, 0.7}), StarBody::cube(2), make_random_polytope(2, 3, 5)}) {
        const StarBody sampled = StarBody::grid_sampled(g, radial_values(k, g), Flag::Yes, Flag::Unknown);
        const StarBody bip = polar(polar(sampled, g), g);
        // Five times the 1e-3 quadrature tolerance.
        CHECK(sup_radial_distance(bip, k, g) < 5e-3);
    }
}

TEST_CASE("convex hull of the star of David is the hexagon") {
    // 768 nodes put every tip and every hexagon normal on the grid.
    const auto g = build_grid(2, 768, GridScheme::UniformAngle);
    std::vector<Facet> hex;
    for (int k = 0; k < 6; ++k) hex.push_back({dir2(k * kPi / 3), std::sqrt(3.0) / 2.0});
    const StarBody hexagon = StarBody::polytope(2, hex);
    const StarBody hull = convex_hull(star_of_david(), g);
    CHECK(hull.convexity() == Flag::Yes);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(hull.radial(g->node(i)) >= star_of_david().radial(g->node(i)) - 1e-9);
        CHECK(hull.radial(g->node(i)) == doctest::Approx(hexagon.radial(g->node(i))).epsilon(1e-9));
    }
    CHECK(hexagon.polytope_data().volume == doctest::Approx(1.5 * std::sqrt(3.0)));

    // Off-grid tips cost first order in the mesh width.
    const auto coarse = build_grid(2, 500, GridScheme::UniformAngle);
    CHECK(sup_radial_distance(convex_hull(star_of_david(), coarse), hexagon, coarse) < 2e-2);
}

TEST_CASE("polar reverses inclusion") {
    const auto g = build_grid(2, 256, GridScheme::UniformAngle);
    const StarBody k = StarBody::cube(2, 0.6);
    const StarBody l = StarBody::ball(2, 1.0);
    const StarBody kp = polar(k, g), lp = polar(l, g);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(lp.radial(g->node(i)) <= kp.radial(g->node(i)) + 1e-14);
}

TEST_CASE("radial and polar support are reciprocal for convex bodies") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    const StarBody k = make_random_polytope(2, 9, 4);
    const StarBody kp = polar(k, g);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(k.radial(g->node(i)) * kp.support(g->node(i)) == doctest::Approx(1.0));
}

TEST_CASE("linear transforms") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    const StarBody scaled = transform(LinearMap::scaling(2, 2.0), StarBody::ball(2, 1.5));
    CHECK(scaled.kind() == BodyKind::Ball);
    CHECK(scaled.ball_radius() == doctest::Approx(3.0));
    CHECK(transform(LinearMap(m2(2, 0, 0, 0.5)), StarBody::ball(2)).radial(dir2(0.0)) == doctest::Approx(2.0));
    const StarBody sheared = transform(LinearMap(m2(1, 1, 0, 1)), StarBody::ball(2));
    CHECK(volume(sheared, g).value == doctest::Approx(kPi).epsilon(1e-10));
    CHECK_THROWS_AS(LinearMap(m2(1, 2, 2, 4)), ConfigError);

    // Composition through the generic wrapper and through closed forms agree.
    const LinearMap s(m2(1.2, 0.3, -0.4, 0.9)), t(m2(0.7, -0.2, 0.5, 1.1));
    for (const StarBody& k : {make_random_star(2, 4, 0.3), StarBody::cube(2), StarBody::ellipsoid_axes({1.3, 0.6})}) {
        const StarBody a = transform(s * t, k);
        const StarBody b = transform(s, transform(t, k));
        for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(a.radial(g->node(i)) - b.radial(g->node(i))) < 1e-10);
    }
}

TEST_CASE("transformed support matches the point cloud") {
    const auto g = build_grid(2, 2048, GridScheme::UniformAngle);
    const StarBody k = transform(LinearMap(m2(1.5, 0.4, 0.0, 0.8)), make_random_polytope(2, 5, 3).with_flags(Flag::Yes, Flag::Unknown));
    const auto rho = radial_values(k, g);
    for (std::size_t i = 0; i < g->size(); i += 97)
        CHECK(k.support(g->node(i)) == doctest::Approx(point_cloud_support_at(*g, rho, g->node(i))).epsilon(5e-3));
}

TEST_CASE("centroids") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    CHECK(centroid(StarBody::ball(2), g).norm() < 1e-14);
    CHECK(centroid(make_random_star(2, 5, 0.4, true), g).norm() < 1e-12);
    // Unit disk centred at (0.3, 0) seen from the origin.
    const StarBody disk = StarBody::from_function(
        2,
        [](std::span<const double> u) {
            const double c = 0.3 * u[0];
            return c + std::sqrt(c * c - 0.09 + 1.0);
        },
        "off-centre-disk", Flag::No, Flag::Yes, [](std::span<const double> u) { return 0.3 * u[0] + 1.0; });
    const Vec c = centroid(disk, g);
    CHECK(std::abs(c[0] - 0.3) < 1e-3);
    CHECK(std::abs(c[1]) < 1e-3);
    CHECK_FALSE(has_centroid_at_origin(disk, g));
    CHECK(has_centroid_at_origin(StarBody::cube(2), g));
    CHECK(has_santalo_point_at_origin(StarBody::cube(2), g));
}

TEST_CASE("random star generator") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    CHECK(make_random_star(2, 3, 0.0).kind() == BodyKind::Ball);
    const StarBody k = make_random_star(2, 3, 0.5, true);
    CHECK(k.symmetry() == Flag::Yes);
    for (std::size_t i = 0; i < g->size() / 2; ++i)
        CHECK(std::abs(k.radial(g->node(i)) - k.radial(g->node(i + g->size() / 2))) <= 1e-10);
    const auto a = radial_values(make_random_star(2, 3, 0.5), g);
    const auto b = radial_values(make_random_star(2, 3, 0.5), g);
    CHECK(a == b);
    for (double r : a) CHECK((r >= 0.5 - 1e-12 && r <= 1.5 + 1e-12));
    CHECK_THROWS_AS(make_random_star(2, 3, 1.0), ConfigError);

    const auto g3 = build_grid(3, 2000, GridScheme::Fibonacci);
    for (double r : radial_values(make_random_star(3, 8, 0.3), g3)) CHECK(r > 0.0);
}

TEST_CASE("invalid bodies are rejected") {
    CHECK_THROWS_AS(StarBody::ball(2, -1.0), InvalidBodyError);
    CHECK_THROWS_AS(StarBody::polytope(2, {{dir2(0.0), 1.0}, {dir2(1.0), 1.0}, {dir2(2.0), 1.0}}), InvalidBodyError);
    CHECK_THROWS_AS(StarBody::polytope(2, {{dir2(0.0), -1.0}, {dir2(2.0), 1.0}, {dir2(4.0), 1.0}}), InvalidBodyError);
    const auto g = build_grid(2, 16, GridScheme::UniformAngle);
    std::vector<double> bad(16, 1.0);
    bad[3] = 0.0;
    CHECK_THROWS_AS(StarBody::grid_sampled(g, bad), InvalidBodyError);
}

TEST_CASE("cube facet geometry in three dimensions") {
    const StarBody cube = StarBody::cube(3);
    const auto& d = cube.polytope_data();
    CHECK(d.vertices.size() == 8);
    for (double a : d.facet_areas) CHECK(a == doctest::Approx(4.0));
    CHECK(d.volume == doctest::Approx(8.0));
    // Octahedron: 8 equilateral facets of side sqrt(2).
    const StarBody octa = polar(cube, build_grid(3, 100, GridScheme::Fibonacci));
    const auto& o = octa.polytope_data();
    CHECK(o.vertices.size() == 6);
    CHECK(o.volume == doctest::Approx(4.0 / 3.0));
    for (double a : o.facet_areas) CHECK(a == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("polygon hull of radial samples") {
    const auto g = build_grid(2, 512, GridScheme::UniformAngle);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto rho = radial_values(make_random_star(2, seed, 0.6), g);
        const auto hull = hull_radial_values(*g, rho);
        const auto again = hull_radial_values(*g, hull);
        const auto h0 = point_cloud_support(*g, rho);
        const auto h1 = point_cloud_support(*g, hull);
        for (std::size_t i = 0; i < g->size(); ++i) {
            CHECK(hull[i] >= rho[i]);
            CHECK(again[i] == doctest::Approx(hull[i]).epsilon(1e-12));
            CHECK(h1[i] == doctest::Approx(h0[i]).epsilon(1e-12));
        }
    }
    // Samples of the square are already convex.
    const auto sq = radial_values(StarBody::cube(2), g);
    const auto sq_hull = hull_radial_values(*g, sq);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(sq_hull[i] == doctest::Approx(sq[i]).epsilon(1e-12));
}
