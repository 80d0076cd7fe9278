#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace strokeforge {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Raster size used for optimization renders. Normalized coordinates map
// to pixels as x_px = x * width, y_px = y * height, origin top-left.
class Canvas {
public:
    static constexpr int kMinSide = 8;
    static constexpr int kDefaultSide = 224;

    Canvas() : Canvas(kDefaultSide, kDefaultSide) {}
    Canvas(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    int min_side() const { return width_ < height_ ? width_ : height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    Vec2 to_pixels(Vec2 normalized) const { return {normalized.x * width_, normalized.y * height_}; }
    Vec2 to_normalized(Vec2 px) const { return {px.x / width_, px.y / height_}; }

    bool operator==(const Canvas&) const = default;

private:
    int width_;
    int height_;
};

// One black cubic Bezier curve. Width is a fraction of the canvas's shorter side.
struct Stroke {
    static constexpr double kDefaultWidth = 0.006;

    std::array<Vec2, 4> control_points{};
    double width = kDefaultWidth;
    int round_id = 0;

    bool operator==(const Stroke&) const = default;
};

// Strokes ordered by round; round k's strokes follow every stroke of rounds < k.
struct Sketch {
    std::vector<Stroke> strokes;
    Canvas canvas;
    int rounds_completed = 0;

    std::size_t parameter_count() const { return strokes.size() * 8; }
    // Appends a round's strokes; they must all carry round_id == next round.
    void append_round(const std::vector<Stroke>& round_strokes);
    bool well_ordered() const;
};

// Binary selection over the photograph. Region 0 is the whole image.
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;
    int region_id = 0;
    std::string label;

    static RegionMask global(int width, int height);

    bool test(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t set_count() const;
    // Throws DomainError unless dimensions agree and at least one bit is set.
    void validate(int expect_width, int expect_height) const;
};

// B(t) for t in [0,1]; DomainError outside.
Vec2 bezier_point(const Stroke& stroke, double t);

// Bernstein basis weights at t.
std::array<double, 4> bernstein(double t);

// segments+1 points at t = i/segments. DomainError when segments == 0.
std::vector<Vec2> flatten(const Stroke& stroke, int segments);

}  // namespace strokeforge
