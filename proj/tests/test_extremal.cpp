#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dorlicz/error.hpp"
#include "dorlicz/extremal.hpp"
#include "dorlicz/functionals.hpp"

using namespace dorlicz;
constexpr double kPi = std::numbers::pi;

namespace {

const GridPtr& circle() {
    static const GridPtr g = build_grid(2, 512, GridScheme::UniformAngle);
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Mat m2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

double closed_form(const OrliczFunction& phi, const StarBody& k) {
    return phi(1.0 / vrad(k, circle())) * 2.0 * volume(k, circle()).value;
}

}  // namespace

TEST_CASE("polar-volume normalization") {
    for (double r : {0.3, 1.0, 2.5}) {
        const auto b = normalize_polar_volume(StarBody::ball(2, r), circle());
        CHECK(b.ball_radius() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto e = StarBody::ellipsoid_axes({2.0, 0.5});
    const auto ne = normalize_polar_volume(e, circle());
    CHECK(rel(volume(ne, circle()).value, kPi) <= 1e-12);
    const auto star = make_random_star(2, 9, 0.4);
    const auto ns = normalize_polar_volume(star.scaled(3.0), circle());
    CHECK(rel(volume(polar(ns, circle()), circle()).value, kPi) <= 1e-3);
}

TEST_CASE("objective examples") {
    const auto m1 = OrliczFunction::power(-1.0);
    const auto k = make_random_star(2, 3, 0.3);
    const ExtremalProblem p(Target::Affine, Sense::Inf, m1, k, circle());
    CHECK(rel(objective(p, StarBody::ball(2)), dual_surface_area(m1, k, circle()).value) <= 1e-12);
    for (double q : {-2.0, 0.5, 3.0}) {
        const ExtremalProblem pb(Target::Affine, Sense::Inf, OrliczFunction::power(q), StarBody::ball(2), circle());
        CHECK(rel(objective(pb, StarBody::ball(2)), 2.0 * kPi) <= 1e-12);
    }
    const ExtremalProblem p2(Target::Affine, Sense::Inf, m1, StarBody::ball(2, 2.0), circle());
    CHECK(rel(objective(p2, StarBody::ball(2)), 16.0 * kPi) <= 1e-12);
}

TEST_CASE("constant phi needs no search") {
    const auto k = StarBody::cube(2);
    for (Target t : {Target::Affine, Target::Geominimal}) {
        const auto r = estimate(ExtremalProblem(t, Sense::Inf, OrliczFunction::constant(2.0), k, circle()));
        CHECK(r.evaluations == 0);
        CHECK(r.converged);
        CHECK(rel(r.value, 2.0 * 2.0 * 4.0) <= 1e-3);
    }
}

TEST_CASE("sense must match the class of phi") {
    const auto k = StarBody::cube(2);
    CHECK_THROWS_AS(estimate(ExtremalProblem(Target::Affine, Sense::Sup, OrliczFunction::power(-1.0), k, circle())), ContractError);
    CHECK_THROWS_AS(estimate(ExtremalProblem(Target::Affine, Sense::Inf, OrliczFunction::power(0.5), k, circle())), ContractError);
    CHECK_THROWS_AS(estimate_ellipsoid_restricted(ExtremalProblem(Target::Geominimal, Sense::Sup, OrliczFunction::power(3.0), k, circle())),
                    ContractError);
    CHECK_THROWS_AS(natural_sense(OrliczFunction::power(2.0), 2), ContractError);
    CHECK(natural_sense(OrliczFunction::power(-1.0), 2) == Sense::Inf);
    CHECK(natural_sense(OrliczFunction::power(0.5), 2) == Sense::Sup);
}

TEST_CASE("ellipsoid-restricted search") {
    const auto m1 = OrliczFunction::power(-1.0);
    const auto ball = estimate_ellipsoid_restricted(ExtremalProblem(Target::Geominimal, Sense::Inf, m1, StarBody::ball(2, 1.3), circle()));
    CHECK(rel(ball.value, closed_form(m1, StarBody::ball(2, 1.3))) <= 1e-6);
    const auto stretched =
        estimate_ellipsoid_restricted(ExtremalProblem(Target::Geominimal, Sense::Inf, m1, StarBody::ellipsoid_axes({3.0, 1.0 / 3.0}), circle()));
    CHECK(rel(stretched.value, 2.0 * kPi) <= 1e-6);
    CHECK(stretched.converged);
    CHECK(stretched.candidate().kind() == BodyKind::Ellipsoid);
}

TEST_CASE("ellipse closed form from the full search") {
    const auto e = StarBody::ellipsoid_axes({2.0, 0.5});
    const auto m1 = OrliczFunction::power(-1.0), half = OrliczFunction::power(0.5);
    for (Target t : {Target::Affine, Target::Geominimal}) {
        const auto a = estimate(ExtremalProblem(t, Sense::Inf, m1, e, circle()));
        CHECK(rel(a.value, closed_form(m1, e)) <= 1e-2);
        CHECK(a.converged);
        const auto b = estimate(ExtremalProblem(t, Sense::Sup, half, e, circle()));
        CHECK(rel(b.value, closed_form(half, e)) <= 1e-2);
    }
}

TEST_CASE("geominimal value of the disk") {
    const auto r = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, OrliczFunction::power(-1.0), StarBody::ball(2), circle()));
    CHECK(rel(r.value, 2.0 * kPi) <= 1e-2);
    CHECK(r.converged);
}

TEST_CASE("square: bracketed by the volume bound and the start candidates") {
    const auto m1 = OrliczFunction::power(-1.0);
    const auto sq = StarBody::cube(2);
    // min over diag(a, 1/a) and rotations, from a separate brute-force scan,
    // is attained at the disk: int rho^3 over the square boundary.
    const double ellipse_oracle = 4.0 * (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0)));
    for (Target t : {Target::Affine, Target::Geominimal}) {
        const ExtremalProblem p(t, Sense::Inf, m1, sq, circle());
        const auto r = estimate(p);
        CHECK(r.value <= objective(p, StarBody::ball(2)) + 1e-12);
        CHECK(r.value <= objective(p, sq) + 1e-12);
        CHECK(r.value <= ellipse_oracle * (1 + 1e-3));
        CHECK(r.value >= closed_form(m1, sq) * (1 - 1e-3));
        CHECK(std::abs(r.value - objective(p, r.candidate())) <= 1e-12 * r.value);
        CHECK(r.markers.ellipsoid.has_value());
        CHECK(rel(*r.markers.ellipsoid, ellipse_oracle) <= 1e-3);
    }
}

TEST_CASE("bound sandwich on random symmetric stars") {
    const auto m1 = OrliczFunction::power(-1.0);
    SearchOptions quick;
    quick.budget = 4000;
    quick.refine_nodes = false;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto k = make_random_star(2, seed, 0.4);
        const auto a = estimate(ExtremalProblem(Target::Affine, Sense::Inf, m1, k, circle(), quick));
        const auto g = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, m1, k, circle(), quick));
        REQUIRE(a.markers.volume_lower.has_value());
        REQUIRE(a.markers.volume_upper.has_value());
        CHECK(*a.markers.volume_lower <= a.value * (1 + 1e-9));
        CHECK(a.value <= g.value * (1 + 3e-2));
        CHECK(g.value <= g.markers.s_marker * (1 + 1e-9));
        CHECK(a.value <= *a.markers.volume_upper * (1 + 1e-9));
    }
}

TEST_CASE("scaling and SL(2) invariance") {
    SearchOptions quick;
    quick.budget = 4000;
    quick.refine_nodes = false;
    const auto p = OrliczFunction::power(-1.0);
    const auto k = make_random_polytope(2, 5, 4);
    const auto base = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, p, k, circle(), quick));
    const auto big = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, p, k.scaled(2.0), circle(), quick));
    CHECK(rel(big.value, std::pow(2.0, 3.0) * base.value) <= 3e-2);
    const LinearMap t(m2(1.5, 0.4, 0.0, 1.0 / 1.5));
    const auto moved = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, p, transform(t, k), circle(), quick));
    CHECK(rel(moved.value, base.value) <= 5e-2);
}

TEST_CASE("i-th mixed estimates") {
    SearchOptions quick;
    quick.budget = 6000;
    const auto half = OrliczFunction::power(0.5);
    const auto b = StarBody::ball(2);
    for (double i : {0.0, 0.7, 2.0}) {
        const auto r = estimate_ith_mixed(half, half, i, b, b, Target::Geominimal, circle(), quick);
        CHECK(rel(r.value, 2.0 * kPi) <= 1e-2);
        CHECK(r.candidates.size() == 2);
    }
    const auto m1 = OrliczFunction::power(-1.0), m2f = OrliczFunction::power(-2.0);
    const auto k = StarBody::ellipsoid_axes({1.5, 0.8}), l = StarBody::cube(2);
    const auto r0 = estimate_ith_mixed(m1, m2f, 0.0, k, l, Target::Geominimal, circle(), quick);
    const auto s0 = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, m1, k, circle(), quick));
    CHECK(rel(r0.value, s0.value) <= 3e-2);
    const auto r2 = estimate_ith_mixed(m1, m2f, 2.0, k, l, Target::Geominimal, circle(), quick);
    const auto s2 = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, m2f, l, circle(), quick));
    CHECK(rel(r2.value, s2.value) <= 3e-2);
    CHECK_THROWS_AS(estimate_ith_mixed(m1, half, 1.0, k, l, Target::Affine, circle(), quick), ContractError);
}

TEST_CASE("multi-body estimates") {
    SearchOptions quick;
    quick.budget = 4000;
    const auto m1 = OrliczFunction::power(-1.0);
    const auto k = make_random_star(2, 21, 0.3);
    const auto single = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, m1, k, circle(), quick));
    for (MultiMode mode : {MultiMode::Joint, MultiMode::PerSlot}) {
        const auto r = estimate_multi({m1, m1}, {k, k}, Target::Geominimal, circle(), mode, quick);
        CHECK(rel(r.value, single.value) <= 3e-2);
        CHECK(r.candidates.size() == 2);
        CHECK(r.candidates[0].digest() == r.candidates[1].digest());
    }
    const auto c = estimate_multi({OrliczFunction::constant(2.0), OrliczFunction::constant(2.0)}, {k, StarBody::ball(2)},
                                  Target::Affine, circle(), MultiMode::Joint, quick);
    CHECK(c.evaluations == 0);
    const auto g4 = build_grid(4, 200, GridScheme::MonteCarlo, 1);
    const auto b4 = StarBody::ball(4);
    CHECK_THROWS_AS(estimate_multi({m1, m1, m1, m1}, {b4, b4, b4, b4}, Target::Affine, g4, MultiMode::Joint), UnsupportedError);
    CHECK_THROWS_AS(estimate_multi({m1, OrliczFunction::power(0.5)}, {k, k}, Target::Affine, circle(), MultiMode::Joint),
                    ContractError);
}

TEST_CASE("three-dimensional search on a coarse grid") {
    const auto g = build_grid(3, 600, GridScheme::Fibonacci);
    SearchOptions quick;
    quick.budget = 1500;
    const auto e = StarBody::ellipsoid_axes({1.5, 1.0, 0.7});
    const auto m1 = OrliczFunction::power(-1.0);
    const auto r = estimate(ExtremalProblem(Target::Affine, Sense::Inf, m1, e, g, quick));
    const double cf = m1(1.0 / vrad(e, g)) * 3.0 * volume(e, g).value;
    CHECK(rel(r.value, cf) <= 2e-2);
}

TEST_CASE("deterministic for a fixed seed") {
    SearchOptions quick;
    quick.budget = 2000;
    const auto k = make_random_star(2, 4, 0.4);
    const ExtremalProblem p(Target::Geominimal, Sense::Inf, OrliczFunction::power(-1.0), k, circle(), quick);
    const auto a = estimate(p), b = estimate(p);
    CHECK(a.value == b.value);
    CHECK(a.trace.size() == b.trace.size());
    CHECK(a.candidate().digest() == b.candidate().digest());
}

TEST_CASE("failure when no evaluation succeeds") {
    SearchOptions quick;
    quick.budget = 50;
    const auto tiny = StarBody::ball(2, 1e-14);
    CHECK_THROWS_AS(estimate(ExtremalProblem(Target::Affine, Sense::Inf, OrliczFunction::power(-1.0), tiny, circle(), quick)),
                    OptimizationError);
}
