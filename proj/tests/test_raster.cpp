#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "strokeforge/error.hpp"
#include "strokeforge/raster.hpp"

using namespace strokeforge;

namespace {

double half_sq_loss(const Sketch& sk, const GrayImage& target) {
    const auto img = render(sk, sk.canvas).image;
    double l = 0.0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const double d = img.pixels[i] - target.pixels[i];
        l += 0.5 * d * d;
    }
    return l;
}

GrayImage half_sq_grad(const Sketch& sk, const GrayImage& target) {
    auto img = render(sk, sk.canvas).image;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] -= target.pixels[i];
    return img;
}

double& coord(Sketch& sk, std::size_t flat) {
    auto& p = sk.strokes[flat / 8].control_points[(flat % 8) / 2];
    return flat % 2 ? p.y : p.x;
}

}  // namespace

TEST_CASE("empty and off-canvas sketches render white") {
    Sketch empty;
    for (double v : render(empty, empty.canvas).image.pixels) CHECK(v == 1.0);

    Sketch off;
    Stroke s;
    s.control_points = {Vec2{2, 2}, Vec2{2, 2}, Vec2{2, 2}, Vec2{2, 2}};
    off.strokes.push_back(s);
    const auto out = render(off, off.canvas);
    CHECK(out.flatten_segments == 24);
    for (double v : out.image.pixels) CHECK(v == 1.0);
}

TEST_CASE("horizontal stroke matches analytic distance") {
    Sketch sk;
    Stroke s;
    s.control_points = {Vec2{0.2, 0.5}, Vec2{0.4, 0.5}, Vec2{0.6, 0.5}, Vec2{0.8, 0.5}};
    sk.strokes.push_back(s);
    const auto img = render(sk, Canvas(224, 224)).image;
    for (int x = 45; x <= 179; ++x) CHECK(img.at(x, 112) < 0.5);

    // Analytic distance from each pixel centre to the segment [44.8,179.2] x {112}.
    for (int y = 0; y < 224; ++y) {
        for (int x = 0; x < 224; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            const double cx = std::clamp(px, 44.8, 179.2);
            if (std::hypot(px - cx, py - 112.0) > 3.0) CHECK(img.at(x, y) > 0.99);
        }
    }
}

TEST_CASE("render stays in [0,1] for wild control points") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    Sketch sk;
    for (int i = 0; i < 6; ++i) {
        Stroke s;
        for (auto& p : s.control_points) p = {u(g), u(g)};
        sk.strokes.push_back(s);
    }
    Stroke nan_stroke;
    nan_stroke.control_points = {Vec2{std::nan(""), 0.5}, Vec2{0.5, 0.5}, Vec2{0.6, 0.6},
                                 Vec2{std::numeric_limits<double>::infinity(), 0.1}};
    sk.strokes.push_back(nan_stroke);
    auto more = fixtures::random_sketch(4, 10);
    sk.strokes.insert(sk.strokes.end(), more.strokes.begin(), more.strokes.end());
    for (double v : render(sk, sk.canvas).image.pixels) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("adding a stroke never brightens; order is irrelevant") {
    auto sk = fixtures::random_sketch(9, 12);
    for (std::size_t n = 1; n < sk.strokes.size(); ++n) {
        Sketch a = sk, b = sk;
        a.strokes.resize(n);
        b.strokes.resize(n + 1);
        const auto ia = render(a, a.canvas).image, ib = render(b, b.canvas).image;
        for (std::size_t i = 0; i < ia.pixels.size(); ++i) CHECK(ib.pixels[i] <= ia.pixels[i]);
    }
    Sketch rev = sk;
    std::reverse(rev.strokes.begin(), rev.strokes.end());
    const auto f = render(sk, sk.canvas).image, r = render(rev, rev.canvas).image;
    for (std::size_t i = 0; i < f.pixels.size(); ++i) CHECK(std::abs(f.pixels[i] - r.pixels[i]) <= 1e-15);
}

TEST_CASE("coverage profile") {
    CHECK(stroke_coverage(0.0, 0.7, 1.0) == 1.0);
    CHECK(stroke_coverage(0.7, 0.7, 1.0) == 1.0);
    CHECK(stroke_coverage(1.7, 0.7, 1.0) == 0.0);
    CHECK(stroke_coverage(1.2, 0.7, 1.0) == doctest::Approx(0.5));
    for (double d = 0.75; d < 1.65; d += 0.05) {
        const double fd = (stroke_coverage(d + 1e-6, 0.7, 1.0) - stroke_coverage(d - 1e-6, 0.7, 1.0)) / 2e-6;
        CHECK(stroke_coverage_slope(d, 0.7, 1.0) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("backward: zero cotangent, locality, non-finite input") {
    auto sk = fixtures::random_sketch(3, 4);
    const auto zero = render_backward(sk, sk.canvas, GrayImage(224, 224, 0.0));
    for (double v : zero.flat()) CHECK(v == 0.0);

    // Stroke 0 near the top-left, cotangent only in the bottom-right quadrant.
    Sketch local;
    Stroke near, far;
    near.control_points = {Vec2{0.1, 0.1}, Vec2{0.15, 0.12}, Vec2{0.2, 0.1}, Vec2{0.22, 0.15}};
    far.control_points = {Vec2{0.7, 0.7}, Vec2{0.75, 0.8}, Vec2{0.8, 0.72}, Vec2{0.9, 0.9}};
    local.strokes = {near, far};
    GrayImage cot(224, 224, 0.0);
    for (int y = 112; y < 224; ++y)
        for (int x = 112; x < 224; ++x) cot.at(x, y) = 1.0;
    const auto g = render_backward(local, local.canvas, cot);
    for (auto p : g.strokes[0]) CHECK((p.x == 0.0 && p.y == 0.0));
    double far_norm = 0.0;
    for (auto p : g.strokes[1]) far_norm += std::abs(p.x) + std::abs(p.y);
    CHECK(far_norm > 0.0);

    GrayImage bad(224, 224, 0.0);
    bad.at(3, 3) = std::nan("");
    CHECK_THROWS_AS(render_backward(sk, sk.canvas, bad), NumericError);
    CHECK_THROWS_AS(render_backward(sk, sk.canvas, GrayImage(100, 100, 0.0)), DomainError);
}

// Step small enough that central-difference truncation is negligible next
// to the 1 px coverage band (1e-6 normalized = 2e-4 px).
TEST_CASE("backward matches central finite differences") {
    int checked = 0, failed = 0;
    for (std::uint64_t seed = 42; seed < 45; ++seed) {
        auto sk = fixtures::random_sketch(seed, 8);
        const auto target = render(fixtures::random_sketch(seed + 1000, 8), sk.canvas).image;
        const auto grad = render_backward(sk, sk.canvas, half_sq_grad(sk, target)).flat();
        const double eps = 1e-6;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            Sketch plus = sk, minus = sk;
            coord(plus, i) += eps;
            coord(minus, i) -= eps;
            const double fd = (half_sq_loss(plus, target) - half_sq_loss(minus, target)) / (2 * eps);
            if (std::abs(grad[i]) <= 1e-4) continue;
            ++checked;
            const double rel = std::abs(fd - grad[i]) / std::abs(grad[i]);
            if (rel > 0.02) {
                ++failed;
                MESSAGE("seed " << seed << " coord " << i << " analytic " << grad[i] << " fd " << fd);
            }
        }
    }
    CHECK(checked > 100);
    CHECK(failed == 0);
}

TEST_CASE("backward passes the dot-product test") {
    std::mt19937_64 g(77);
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto sk = fixtures::random_sketch(500 + seed, 8);
        GrayImage u(224, 224);
        for (auto& v : u.pixels) v = n(g);
        std::vector<double> v(sk.parameter_count());
        for (auto& x : v) x = n(g);

        const double h = 1e-6;
        Sketch plus = sk, minus = sk;
        for (std::size_t i = 0; i < v.size(); ++i) {
            coord(plus, i) += h * v[i];
            coord(minus, i) -= h * v[i];
        }
        const auto ip = render(plus, plus.canvas).image, im = render(minus, minus.canvas).image;
        double lhs = 0.0;
        for (std::size_t i = 0; i < ip.pixels.size(); ++i) lhs += u.pixels[i] * (ip.pixels[i] - im.pixels[i]) / (2 * h);

        const auto grad = render_backward(sk, sk.canvas, u).flat();
        double rhs = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) rhs += grad[i] * v[i];
        CHECK(std::abs(lhs - rhs) <= 0.01 * std::abs(rhs));
    }
}
