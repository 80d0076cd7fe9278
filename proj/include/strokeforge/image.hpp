#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace strokeforge {

// Single-channel raster, row-major, values nominally in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    bool empty() const { return pixels.empty(); }
    std::size_t size() const { return pixels.size(); }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }
};

// Interleaved RGB raster, row-major, values in [0,1].
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // size = 3*w*h

    RgbImage() = default;
    RgbImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

    bool empty() const { return pixels.empty(); }
    double& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
};

RgbImage gray_to_rgb(const GrayImage& g);

}  // namespace strokeforge
