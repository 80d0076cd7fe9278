#pragma once

#include <array>
#include <vector>

#include "strokeforge/geometry.hpp"
#include "strokeforge/image.hpp"

namespace strokeforge {

struct RenderOptions {
    int flatten_segments = 24;
    // Width in pixels over which coverage falls from 1 to 0 past the half-width.
    double smoothing_px = 1.0;
};

struct RenderOutput {
    GrayImage image;  // white = 1
    int flatten_segments = 0;
};

// d(loss)/d(control point), normalized units^-1, one entry per stroke.
struct ParamGradient {
    std::vector<std::array<Vec2, 4>> strokes;

    std::vector<double> flat() const;
};

// Coverage of a pixel at distance `d_px` from a stroke's centre line.
// 1 inside the half-width, C2 falloff to 0 across the smoothing band.
double stroke_coverage(double d_px, double half_width_px, double smoothing_px);
double stroke_coverage_slope(double d_px, double half_width_px, double smoothing_px);

// Each stroke is flattened to a polyline and composited as black ink:
// pixel = prod_s (1 - coverage_s). Stroke order does not affect the result.
RenderOutput render(const Sketch& sketch, const Canvas& canvas, const RenderOptions& options = {});

// Adjoint of `render` applied to d_pixels: returns <d_pixels, d render / d params>.
// Throws NumericError when d_pixels contains NaN/Inf.
ParamGradient render_backward(const Sketch& sketch, const Canvas& canvas, const GrayImage& d_pixels,
                              const RenderOptions& options = {});

}  // namespace strokeforge
