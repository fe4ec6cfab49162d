#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "hotspots/errors.hpp"
#include "hotspots/geometry.hpp"
#include "test_support.hpp"

using namespace hotspots;
using hotspots::testing::brute_force_diameter;
using hotspots::testing::random_convex;

namespace {
const double pi = std::numbers::pi;

ConvexDomain unit_square() { return make_rectangle(1.0, 1.0); }
}  // namespace

TEST_CASE("construction cleans and validates vertices") {
    // clockwise input with a collinear midpoint and a repeated vertex
    ConvexDomain d({{0, 0}, {0, 1}, {1, 1}, {1, 1}, {1, 0.5}, {1, 0}});
    CHECK(d.size() == 4);
    CHECK(d.area() == doctest::Approx(1.0));
    CHECK_THROWS_AS(ConvexDomain({{0, 0}, {1, 0}}), InputError);
    CHECK_THROWS_AS(ConvexDomain({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), InputError);
    CHECK_THROWS_AS(ConvexDomain({{0, 0}, {1, 0}, {2, 0}}), InputError);
}

TEST_CASE("contains and distance to boundary") {
    const auto sq = unit_square();
    CHECK(sq.contains({0.5, 0.5}));
    CHECK(sq.distance_to_boundary({0.5, 0.5}) == doctest::Approx(0.5));
    CHECK_FALSE(sq.contains({2.0, 0.0}));
    CHECK(sq.contains({1.0, 0.3}));
    CHECK(std::abs(sq.distance_to_boundary({1.0, 0.3})) <= 1e-12);
    CHECK(sq.project({2.0, 0.5}) == Vec2{1.0, 0.5});
}

TEST_CASE("diameter of canonical shapes") {
    CHECK(diameter(unit_square()).length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(diameter(make_rectangle(10, 1)).length == doctest::Approx(std::sqrt(101.0)).epsilon(1e-15));
    const auto disk = make_disk(1.0, 256);
    const double brute = brute_force_diameter(disk);
    CHECK(std::abs(brute - 2.0) <= 1e-3);
    CHECK(diameter(disk).length == brute);
}

TEST_CASE("diameter matches brute force on 1000 random hulls") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = random_convex(rng, 64);
        const auto dp = diameter(d);
        REQUIRE(dp.length == brute_force_diameter(d));
        CHECK(distance(dp.a, dp.b) == dp.length);
    }
}

TEST_CASE("all diameter pairs: square and rectangle") {
    SUBCASE("unit square keeps both diagonals, two clusters of two") {
        const auto set = all_diameter_pairs(unit_square(), 1e-9);
        REQUIRE(set.pairs.size() == 2);
        int in_zero = 0;
        for (auto [la, lb] : set.labels) {
            CHECK(la != lb);
            in_zero += (la == 0) + (lb == 0);
        }
        CHECK(in_zero == 2);
    }
    SUBCASE("10x1 rectangle clusters at the short ends") {
        const auto set = all_diameter_pairs(make_rectangle(10, 1), 1e-9);
        REQUIRE(set.pairs.size() == 2);
        const auto [c0, c1] = set.cluster_centers;
        CHECK(std::min(c0.x, c1.x) == doctest::Approx(0.0));
        CHECK(std::max(c0.x, c1.x) == doctest::Approx(10.0));
        CHECK(set.cluster_radius_over_inrad == doctest::Approx(1.0));
    }
}

TEST_CASE("all diameter pairs match brute-force enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_convex(rng, 30);
        for (double tol : {1e-9, 1e-4, 1e-3}) {
            const double dmax = brute_force_diameter(d);
            std::set<std::pair<int, int>> expected;
            for (std::size_t i = 0; i < d.size(); ++i)
                for (std::size_t j = i + 1; j < d.size(); ++j)
                    if (distance(d.vertex(i), d.vertex(j)) >= (1.0 - tol) * dmax)
                        expected.emplace(static_cast<int>(i), static_cast<int>(j));
            std::set<std::pair<int, int>> got;
            for (const auto& p : all_diameter_pairs(d, tol).pairs) {
                CHECK(p.length >= (1.0 - tol) * dmax);
                got.emplace(std::min(p.index_a, p.index_b), std::max(p.index_a, p.index_b));
            }
            REQUIRE(got == expected);
        }
    }
    CHECK_THROWS_AS(all_diameter_pairs(unit_square(), 0.0), InputError);
    CHECK_THROWS_AS(all_diameter_pairs(unit_square(), 1e-2), InputError);
}

TEST_CASE("diameter clustering verifier") {
    SUBCASE("rectangle: endpoints at each end are one inradius... two half-widths apart") {
        const auto r = verify_diameter_clustering(make_rectangle(10, 1));
        CHECK(r.c_estimate == doctest::Approx(1.0));
        CHECK(r.pass);
        CHECK(r.elongated);
    }
    SUBCASE("ellipse (8,1), 512-gon: near-diameter pairs coincide at the tips") {
        const auto r = verify_diameter_clustering(make_ellipse(8, 1, 512));
        CHECK(r.c_estimate <= 0.1);
        CHECK(r.pass);
    }
    SUBCASE("stadium 8x2 with round caps") {
        const auto r = verify_diameter_clustering(make_stadium(8, 1, 256));
        CHECK(std::isfinite(r.c_estimate));
        CHECK(r.pass);
    }
}

TEST_CASE("inradius and incenter") {
    auto ic = inradius_incenter(unit_square());
    CHECK(ic.radius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ic.center.x == doctest::Approx(0.5));
    CHECK(ic.center.y == doctest::Approx(0.5));

    ic = inradius_incenter(make_rectangle(10, 1));
    CHECK(ic.radius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ic.center.y == doctest::Approx(0.5));
    CHECK(ic.center.x >= 0.5 - 1e-9);
    CHECK(ic.center.x <= 9.5 + 1e-9);

    ic = inradius_incenter(make_triangle({0, 0}, {4, 0}, {0, 3}));
    CHECK(ic.radius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ic.center.x == doctest::Approx(1.0));
    CHECK(ic.center.y == doctest::Approx(1.0));

    ic = inradius_incenter(make_disk(1.0, 256));
    CHECK(ic.radius == doctest::Approx(std::cos(pi / 256)).epsilon(1e-12));
}

TEST_CASE("incircle radius equals the minimal edge distance and beats random candidates") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_convex(rng, 40);
        const auto ic = inradius_incenter(d);
        CHECK(std::abs(ic.radius - d.distance_to_boundary(ic.center)) <= 1e-9);
        std::uniform_real_distribution<double> ux(d.min_corner().x, d.max_corner().x),
            uy(d.min_corner().y, d.max_corner().y);
        for (int k = 0; k < 200; ++k) {
            const Vec2 p{ux(rng), uy(rng)};
            CHECK(d.distance_to_boundary(p) <= ic.radius + 1e-12);
        }
    }
}

TEST_CASE("normalize canonical domains") {
    SUBCASE("axis-aligned 10x1 rectangle") {
        const auto [n, r] = normalize(make_rectangle(10, 1));
        CHECK(r.rotation_angle == 0.0);
        CHECK(r.scale == doctest::Approx(2.0));
        CHECK(r.aspect_N == doctest::Approx(2.0 * std::sqrt(101.0)));
        CHECK(r.inradius == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.width_y == doctest::Approx(2.0));
        CHECK(n.min_corner().x == doctest::Approx(0.0));
    }
    SUBCASE("rectangle rotated by 30 degrees") {
        const auto rotated = transformed(make_rectangle(10, 1), pi / 6, {3.0, -2.0});
        const auto [n, r] = normalize(rotated);
        CHECK(std::abs(r.rotation_angle + pi / 6) <= 1e-9);
        CHECK(r.width_y == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("disk polygon") {
        const auto [n, r] = normalize(make_disk(1.0, 256));
        CHECK(std::abs(r.aspect_N - 2.0) <= 1e-3);
    }
}

TEST_CASE("normalize invariants over random hulls") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_convex(rng, 30);
        const auto [n, r] = normalize(d);
        CHECK(std::abs(r.inradius - 1.0) <= 1e-9);
        CHECK(r.aspect_N >= 2.0 - 1e-9);
        const double wmin = minimal_width(n).width;
        CHECK(std::abs(r.width_y - wmin) <= 1e-9);
        // brute force the width over many directions: vertical is minimal
        for (int k = 0; k < 180; ++k) {
            const double th = pi * k / 180.0;
            const Vec2 u{std::cos(th), std::sin(th)};
            double lo = 1e300, hi = -1e300;
            for (const auto& p : n.vertices()) {
                lo = std::min(lo, dot(u, p));
                hi = std::max(hi, dot(u, p));
            }
            CHECK(hi - lo >= wmin - 1e-9);
        }
        // 2 inrad <= width <= diameter
        CHECK(2.0 * r.inradius <= wmin + 1e-9);
        CHECK(wmin <= r.diameter + 1e-9);
        // idempotent
        const auto [n2, r2] = normalize(n);
        REQUIRE(n2.size() == n.size());
        for (std::size_t i = 0; i < n.size(); ++i) CHECK(distance(n.vertex(i), n2.vertex(i)) < 1e-9);
    }
}

TEST_CASE("ball volume closed forms") {
    const auto sq = unit_square();
    CHECK(ball_volume(sq, {0.5, 0.5}, 0.25) == doctest::Approx(pi / 16).epsilon(1e-12));
    CHECK(ball_volume(sq, {0.0, 0.0}, 0.5) == doctest::Approx(pi / 16).epsilon(1e-12));
    CHECK(ball_volume(sq, {0.5, 0.5}, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
    // half disk on an edge
    CHECK(ball_volume(sq, {0.5, 0.0}, 0.3) == doctest::Approx(0.5 * pi * 0.09).epsilon(1e-12));
    CHECK_THROWS_AS(ball_volume(sq, {2.0, 2.0}, 0.5), InputError);
}

TEST_CASE("ball volume against Monte Carlo rejection sampling") {
    const auto rect = make_rectangle(10, 1);
    const double exact = ball_volume(rect, {5.0, 0.5}, 2.0);
    const auto mc = hotspots::testing::monte_carlo_ball_area(rect, {5.0, 0.5}, 2.0, 10'000'000, 99);
    CHECK(std::abs(exact - mc.value) <= 3.0 * mc.stderr_);
    // circular segment closed form: disk radius 2 clipped by |y-0.5| <= 0.5
    const double r = 2.0, h = 0.5;
    const double strip = 2.0 * (h * std::sqrt(r * r - h * h) + r * r * std::asin(h / r));
    CHECK(exact == doctest::Approx(strip).epsilon(1e-12));
}

TEST_CASE("ball volume is monotone and equals pi r^2 inside") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = random_convex(rng, 20);
        const auto ic = inradius_incenter(d);
        double prev = 0.0;
        for (int k = 1; k <= 40; ++k) {
            const double r = 0.05 * k * d.scale();
            const double v = ball_volume(d, ic.center, r);
            CHECK(v >= prev - 1e-12);
            prev = v;
            if (r <= ic.radius) CHECK(v == doctest::Approx(pi * r * r).epsilon(1e-10));
        }
        CHECK(prev == doctest::Approx(d.area()).epsilon(1e-10));
    }
}

TEST_CASE("volume comparability brackets on elongated domains") {
    std::mt19937_64 rng(23);
    std::vector<ConvexDomain> family{normalize(make_rectangle(10, 1)).first,
                                     normalize(make_ellipse(8, 1)).first,
                                     normalize(make_stadium(8, 1)).first};
    for (const auto& d : family) {
        REQUIRE(normalize(d).second.aspect_N >= 8.0);
        std::uniform_real_distribution<double> ux(d.min_corner().x, d.max_corner().x),
            uy(d.min_corner().y, d.max_corner().y), ang(0.0, 2.0 * pi), rad(0.0, 1.0);
        int pairs = 0;
        while (pairs < 100) {
            const Vec2 x{ux(rng), uy(rng)};
            if (!d.contains(x)) continue;
            const double th = ang(rng);
            const Vec2 y = x + Vec2{std::cos(th), std::sin(th)} * rad(rng);
            if (!d.contains(y)) continue;
            ++pairs;
            for (double delta : {0.1, 0.25}) {
                const double ratio = ball_volume(d, x, 1.0) / ball_volume(d, y, delta);
                CHECK(ratio >= delta * delta / 64.0);
                CHECK(ratio <= 64.0 / (delta * delta));
            }
        }
    }
}

TEST_CASE("clipped area and equal-area slabs") {
    const auto sq = unit_square();
    CHECK(clipped_area(sq, {0.25, 0.25}, {0.5, 0.75}) == doctest::Approx(0.125));
    const auto disk = make_disk(1.0, 256);
    const auto cuts = equal_area_slabs(disk, 5);
    REQUIRE(cuts.size() == 6);
    for (int j = 0; j < 5; ++j) {
        const double a = clipped_area(disk, {cuts[j], -2.0}, {cuts[j + 1], 2.0});
        CHECK(a == doctest::Approx(disk.area() / 5).epsilon(1e-9));
    }
}
