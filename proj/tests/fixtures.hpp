#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "strokeforge/geometry.hpp"
#include "strokeforge/image.hpp"
#include "strokeforge/raster.hpp"

namespace fixtures {

using namespace strokeforge;

inline GrayImage step_image(int size = 64) {
    GrayImage g(size, size, 0.0);
    for (int y = 0; y < size; ++y)
        for (int x = size / 2; x < size; ++x) g.at(x, y) = 1.0;
    return g;
}

// Anti-aliased black ring on white; radius in normalized units.
inline GrayImage circle_outline(int size = 224, double radius = 0.3, double thickness_px = 2.0) {
    GrayImage g(size, size, 1.0);
    const double c = size / 2.0, r = radius * size;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double d = std::abs(std::hypot(x + 0.5 - c, y + 0.5 - c) - r);
            const double ink = std::clamp(thickness_px / 2.0 + 0.5 - d, 0.0, 1.0);
            g.at(x, y) = 1.0 - ink;
        }
    }
    return g;
}

// A small synthetic "scene": sky gradient, ground, a house and a sun.
inline RgbImage scene_photo(int size = 224) {
    RgbImage img(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double fy = (y + 0.5) / size, fx = (x + 0.5) / size;
            double r, g, b;
            if (fy < 0.6) {
                r = 0.55 + 0.3 * fy;
                g = 0.7 + 0.2 * fy;
                b = 0.95;
            } else {
                r = 0.3;
                g = 0.55 - 0.2 * (fy - 0.6);
                b = 0.25;
            }
            if (std::hypot(fx - 0.8, fy - 0.18) < 0.09) r = 1.0, g = 0.85, b = 0.2;
            if (fx > 0.2 && fx < 0.55 && fy > 0.4 && fy < 0.75) r = 0.7, g = 0.35, b = 0.3;
            if (fx > 0.3 && fx < 0.38 && fy > 0.58 && fy < 0.75) r = 0.25, g = 0.15, b = 0.1;
            if (fx > 0.44 && fx < 0.51 && fy > 0.48 && fy < 0.56) r = 0.85, g = 0.9, b = 1.0;
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = b;
        }
    }
    return img;
}

inline Sketch random_sketch(std::uint64_t seed, int strokes, const Canvas& canvas = Canvas(),
                            double spread = 0.12) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> pos(0.15, 0.85), off(-spread, spread);
    Sketch sk;
    sk.canvas = canvas;
    for (int i = 0; i < strokes; ++i) {
        Stroke s;
        const Vec2 c{pos(g), pos(g)};
        for (auto& p : s.control_points) p = c + Vec2{off(g), off(g)};
        sk.strokes.push_back(s);
    }
    sk.rounds_completed = 1;
    return sk;
}

inline GrayImage random_image(std::uint64_t seed, int w, int h, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    GrayImage img(w, h);
    for (auto& v : img.pixels) v = u(g);
    return img;
}

}  // namespace fixtures
