#include "strokeforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strokeforge/error.hpp"
#include "strokeforge/image.hpp"

namespace strokeforge {

Canvas::Canvas(int width, int height) : width_(width), height_(height) {
    if (width < kMinSide || height < kMinSide) {
        throw DomainError("canvas must be at least 8x8, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
}

void Sketch::append_round(const std::vector<Stroke>& round_strokes) {
    for (const auto& s : round_strokes) {
        if (s.round_id != rounds_completed) {
            throw DomainError("stroke round_id " + std::to_string(s.round_id) +
                              " does not match the round being appended (" +
                              std::to_string(rounds_completed) + ")");
        }
    }
    strokes.insert(strokes.end(), round_strokes.begin(), round_strokes.end());
    ++rounds_completed;
}

bool Sketch::well_ordered() const {
    int last = 0;
    for (const auto& s : strokes) {
        if (s.round_id < last || s.round_id >= std::max(rounds_completed, 1)) return false;
        last = s.round_id;
    }
    return true;
}

RegionMask RegionMask::global(int width, int height) {
    RegionMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, 1);
    m.region_id = 0;
    m.label = "global";
    return m;
}

std::size_t RegionMask::set_count() const {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

void RegionMask::validate(int expect_width, int expect_height) const {
    if (width != expect_width || height != expect_height ||
        bits.size() != static_cast<std::size_t>(width) * height) {
        throw DomainError("mask " + std::to_string(region_id) + " is " + std::to_string(width) + "x" +
                          std::to_string(height) + ", expected " + std::to_string(expect_width) + "x" +
                          std::to_string(expect_height));
    }
    if (set_count() == 0) {
        throw DomainError("mask " + std::to_string(region_id) + " selects no pixels");
    }
}

std::array<double, 4> bernstein(double t) {
    const double s = 1.0 - t;
    return {s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t};
}

Vec2 bezier_point(const Stroke& stroke, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("bezier parameter t must lie in [0,1]");
    }
    // Exact endpoints even when an interior control point is non-finite.
    if (t == 0.0) return stroke.control_points[0];
    if (t == 1.0) return stroke.control_points[3];
    const auto w = bernstein(t);
    Vec2 p;
    for (int i = 0; i < 4; ++i) p += stroke.control_points[i] * w[i];
    return p;
}

std::vector<Vec2> flatten(const Stroke& stroke, int segments) {
    if (segments < 1) {
        throw DomainError("flatten needs at least one segment");
    }
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(segments) + 1);
    for (int i = 0; i <= segments; ++i) {
        out.push_back(bezier_point(stroke, static_cast<double>(i) / segments));
    }
    return out;
}

RgbImage gray_to_rgb(const GrayImage& g) {
    RgbImage out(g.width, g.height);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) {
        out.pixels[3 * i] = out.pixels[3 * i + 1] = out.pixels[3 * i + 2] = g.pixels[i];
    }
    return out;
}

}  // namespace strokeforge
