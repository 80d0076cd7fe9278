#include <doctest.h>

#include <random>

#include "strokeforge/error.hpp"
#include "strokeforge/geometry.hpp"

using namespace strokeforge;

namespace {

Stroke make_stroke(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    Stroke s;
    s.control_points = {a, b, c, d};
    return s;
}

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double tol) {
    const double area = cross(b - a, c - a);
    if (std::abs(area) < 1e-300) {
        // Degenerate triangle: accept points on one of its edges.
        auto on_seg = [&](Vec2 u, Vec2 v) {
            const Vec2 uv = v - u;
            const double len2 = dot(uv, uv);
            const double t = len2 > 0 ? std::clamp(dot(p - u, uv) / len2, 0.0, 1.0) : 0.0;
            const Vec2 q = u + uv * t;
            return std::hypot(p.x - q.x, p.y - q.y) <= tol;
        };
        return on_seg(a, b) || on_seg(b, c) || on_seg(a, c);
    }
    const double s1 = cross(b - a, p - a) / area;
    const double s2 = cross(c - b, p - b) / area;
    const double s3 = cross(a - c, p - c) / area;
    const double scale = std::sqrt(std::abs(area));
    return s1 >= -tol / scale && s2 >= -tol / scale && s3 >= -tol / scale;
}

bool in_hull(Vec2 p, const std::array<Vec2, 4>& q, double tol) {
    return in_triangle(p, q[0], q[1], q[2], tol) || in_triangle(p, q[0], q[1], q[3], tol) ||
           in_triangle(p, q[0], q[2], q[3], tol) || in_triangle(p, q[1], q[2], q[3], tol);
}

}  // namespace

TEST_CASE("bezier_point endpoints and midpoint") {
    const auto s = make_stroke({0, 0}, {0, 0}, {1, 1}, {1, 1});
    CHECK(bezier_point(s, 0.0) == Vec2{0, 0});
    CHECK(bezier_point(s, 1.0) == Vec2{1, 1});
    const auto mid = bezier_point(s, 0.5);
    CHECK(mid.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mid.y == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("bezier_point rejects t outside [0,1]") {
    const auto s = make_stroke({0, 0}, {1, 0}, {1, 1}, {0, 1});
    CHECK_THROWS_AS(bezier_point(s, -1e-9), DomainError);
    CHECK_THROWS_AS(bezier_point(s, 1.0 + 1e-9), DomainError);
    CHECK_THROWS_AS(bezier_point(s, std::nan("")), DomainError);
}

TEST_CASE("flatten examples") {
    const auto s = make_stroke({0.1, 0.2}, {0.4, 0.9}, {0.7, 0.1}, {0.9, 0.8});
    const auto one = flatten(s, 1);
    REQUIRE(one.size() == 2);
    CHECK(one[0] == s.control_points[0]);
    CHECK(one[1] == s.control_points[3]);

    const Vec2 c{0.3, 0.6};
    const auto dot_stroke = make_stroke(c, c, c, c);
    const auto pts = flatten(dot_stroke, 8);
    REQUIRE(pts.size() == 9);
    for (auto p : pts) {
        CHECK(p.x == doctest::Approx(c.x).epsilon(1e-15));
        CHECK(p.y == doctest::Approx(c.y).epsilon(1e-15));
    }

    const auto line = make_stroke({0, 0}, {1.0 / 3.0, 0}, {2.0 / 3.0, 0}, {1, 0});
    const auto lp = flatten(line, 4);
    REQUIRE(lp.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(lp[i].x - 0.25 * i) <= 1e-9);
        CHECK(std::abs(lp[i].y) <= 1e-9);
    }

    CHECK_THROWS_AS(flatten(line, 0), DomainError);
}

TEST_CASE("curve properties on random strokes") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto s = make_stroke({u(g), u(g)}, {u(g), u(g)}, {u(g), u(g)}, {u(g), u(g)});
        CHECK(bezier_point(s, 0.0) == s.control_points[0]);
        CHECK(bezier_point(s, 1.0) == s.control_points[3]);

        for (auto p : flatten(s, 24)) CHECK(in_hull(p, s.control_points, 1e-9));

        const Vec2 delta{u(g), u(g)};
        Stroke moved = s;
        for (auto& p : moved.control_points) p += delta;
        for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
            const auto a = bezier_point(s, t) + delta;
            const auto b = bezier_point(moved, t);
            CHECK(std::abs(a.x - b.x) <= 1e-12);
            CHECK(std::abs(a.y - b.y) <= 1e-12);
        }
    }
}

TEST_CASE("canvas and mask invariants") {
    CHECK_THROWS_AS(Canvas(7, 64), DomainError);
    const Canvas c(224, 112);
    CHECK(c.min_side() == 112);
    CHECK(c.to_pixels({0.5, 0.5}) == Vec2{112, 56});

    auto m = RegionMask::global(16, 16);
    CHECK(m.region_id == 0);
    CHECK(m.set_count() == 256);
    CHECK_NOTHROW(m.validate(16, 16));
    CHECK_THROWS_AS(m.validate(16, 17), DomainError);
    std::fill(m.bits.begin(), m.bits.end(), 0);
    CHECK_THROWS_AS(m.validate(16, 16), DomainError);
}

TEST_CASE("sketch rounds stay contiguous") {
    Sketch sk;
    Stroke a;
    a.round_id = 0;
    sk.append_round({a, a});
    Stroke b;
    b.round_id = 1;
    sk.append_round({b});
    CHECK(sk.rounds_completed == 2);
    CHECK(sk.well_ordered());
    CHECK(sk.parameter_count() == 24);
    Stroke stale;
    stale.round_id = 0;
    CHECK_THROWS_AS(sk.append_round({stale}), DomainError);
}
