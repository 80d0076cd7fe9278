#include "strokeforge/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "strokeforge/error.hpp"

namespace strokeforge {
namespace {

struct Segment {
    Vec2 a;
    Vec2 b;
};

// Closest point on segment ab to p, as parameter t in [0,1].
double closest_t(Vec2 p, const Segment& s) {
    const Vec2 ab = s.b - s.a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return 0.0;
    return std::clamp(dot(p - s.a, ab) / len2, 0.0, 1.0);
}

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// One pixel touched by one stroke.
struct CoverageSample {
    std::int32_t pixel;
    std::int32_t segment;
    double coverage;
};

// Visits every stroke's non-zero coverage. Shared scratch keeps per-stroke
// min-distance bookkeeping allocation-free.
class CoverageScanner {
public:
    CoverageScanner(const Canvas& canvas, const RenderOptions& options)
        : canvas_(canvas),
          options_(options),
          best_d2_(canvas.pixel_count()),
          best_seg_(canvas.pixel_count()),
          stamp_(canvas.pixel_count(), -1) {}

    // Fills `px_vertices` with the flattened polyline (pixel units) and
    // `samples` with all pixels of non-zero coverage.
    void scan(const Stroke& stroke, int stamp, std::vector<Vec2>& px_vertices, std::vector<CoverageSample>& samples) {
        samples.clear();
        touched_.clear();
        px_vertices.clear();
        for (const auto& v : flatten(stroke, options_.flatten_segments)) px_vertices.push_back(canvas_.to_pixels(v));

        const double half = half_width_px(stroke);
        const double reach = half + options_.smoothing_px;
        const int w = canvas_.width(), h = canvas_.height();

        for (int si = 0; si + 1 < static_cast<int>(px_vertices.size()); ++si) {
            const Segment seg{px_vertices[si], px_vertices[si + 1]};
            if (!finite(seg.a) || !finite(seg.b)) continue;
            // Pixel centres sit at integer + 0.5.
            const double x0 = std::min(seg.a.x, seg.b.x) - reach - 0.5;
            const double x1 = std::max(seg.a.x, seg.b.x) + reach - 0.5;
            const double y0 = std::min(seg.a.y, seg.b.y) - reach - 0.5;
            const double y1 = std::max(seg.a.y, seg.b.y) + reach - 0.5;
            if (x1 < 0.0 || y1 < 0.0 || x0 > w - 1 || y0 > h - 1) continue;
            const int ix0 = static_cast<int>(std::ceil(std::max(x0, 0.0)));
            const int ix1 = static_cast<int>(std::floor(std::min(x1, static_cast<double>(w - 1))));
            const int iy0 = static_cast<int>(std::ceil(std::max(y0, 0.0)));
            const int iy1 = static_cast<int>(std::floor(std::min(y1, static_cast<double>(h - 1))));
            const double reach2 = reach * reach;
            for (int y = iy0; y <= iy1; ++y) {
                for (int x = ix0; x <= ix1; ++x) {
                    const Vec2 p{x + 0.5, y + 0.5};
                    const double t = closest_t(p, seg);
                    const Vec2 q = seg.a + (seg.b - seg.a) * t;
                    const double d2 = dot(p - q, p - q);
                    if (d2 >= reach2) continue;
                    const auto k = static_cast<std::size_t>(y) * w + x;
                    if (stamp_[k] != stamp) {
                        stamp_[k] = stamp;
                        best_d2_[k] = d2;
                        best_seg_[k] = si;
                        touched_.push_back(static_cast<std::int32_t>(k));
                    } else if (d2 < best_d2_[k]) {
                        best_d2_[k] = d2;
                        best_seg_[k] = si;
                    }
                }
            }
        }

        std::sort(touched_.begin(), touched_.end());
        for (auto k : touched_) {
            const double c = stroke_coverage(std::sqrt(best_d2_[k]), half, options_.smoothing_px);
            if (c > 0.0) samples.push_back({k, best_seg_[k], c});
        }
    }

    double half_width_px(const Stroke& s) const { return 0.5 * s.width * canvas_.min_side(); }

private:
    Canvas canvas_;
    RenderOptions options_;
    std::vector<double> best_d2_;
    std::vector<std::int32_t> best_seg_;
    std::vector<int> stamp_;
    std::vector<std::int32_t> touched_;
};

void check_options(const RenderOptions& o) {
    if (o.flatten_segments < 1) throw DomainError("render needs at least one flatten segment");
    if (!(o.smoothing_px > 0.0)) throw DomainError("coverage smoothing band must be positive");
}

}  // namespace

std::vector<double> ParamGradient::flat() const {
    std::vector<double> out;
    out.reserve(strokes.size() * 8);
    for (const auto& s : strokes) {
        for (const auto& p : s) {
            out.push_back(p.x);
            out.push_back(p.y);
        }
    }
    return out;
}

double stroke_coverage(double d, double half, double band) {
    const double u = (d - half) / band;
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - u * u * u * (u * (u * 6.0 - 15.0) + 10.0);
}

double stroke_coverage_slope(double d, double half, double band) {
    const double u = (d - half) / band;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = u * (1.0 - u);
    return -30.0 * v * v / band;
}

RenderOutput render(const Sketch& sketch, const Canvas& canvas, const RenderOptions& options) {
    check_options(options);
    RenderOutput out{GrayImage(canvas.width(), canvas.height(), 1.0), options.flatten_segments};
    CoverageScanner scanner(canvas, options);
    std::vector<Vec2> verts;
    std::vector<CoverageSample> samples;
    for (std::size_t s = 0; s < sketch.strokes.size(); ++s) {
        scanner.scan(sketch.strokes[s], static_cast<int>(s), verts, samples);
        for (const auto& c : samples) out.image.pixels[c.pixel] *= 1.0 - c.coverage;
    }
    return out;
}

ParamGradient render_backward(const Sketch& sketch, const Canvas& canvas, const GrayImage& d_pixels,
                              const RenderOptions& options) {
    check_options(options);
    if (d_pixels.width != canvas.width() || d_pixels.height != canvas.height()) {
        throw DomainError("pixel gradient shape does not match the canvas");
    }
    for (double g : d_pixels.pixels) {
        if (!std::isfinite(g)) throw NumericError("non-finite pixel gradient passed to render_backward");
    }

    const std::size_t n = sketch.strokes.size();
    ParamGradient grad;
    grad.strokes.assign(n, {});
    if (n == 0) return grad;

    CoverageScanner scanner(canvas, options);
    std::vector<std::vector<Vec2>> verts(n);
    std::vector<std::vector<CoverageSample>> samples(n);
    // Per pixel: product of non-zero (1 - c) factors and count of fully covered strokes.
    std::vector<double> product(canvas.pixel_count(), 1.0);
    std::vector<int> opaque(canvas.pixel_count(), 0);
    for (std::size_t s = 0; s < n; ++s) {
        scanner.scan(sketch.strokes[s], static_cast<int>(s), verts[s], samples[s]);
        for (const auto& c : samples[s]) {
            const double f = 1.0 - c.coverage;
            if (f > 0.0) {
                product[c.pixel] *= f;
            } else {
                ++opaque[c.pixel];
            }
        }
    }

    const int w = canvas.width();
    const std::array<double, 2> scale{static_cast<double>(canvas.width()), static_cast<double>(canvas.height())};
    std::vector<Vec2> vgrad;
    for (std::size_t s = 0; s < n; ++s) {
        const Stroke& stroke = sketch.strokes[s];
        const double half = scanner.half_width_px(stroke);
        vgrad.assign(verts[s].size(), Vec2{});
        bool any = false;
        for (const auto& c : samples[s]) {
            const double g = d_pixels.pixels[c.pixel];
            if (g == 0.0) continue;
            const double f = 1.0 - c.coverage;
            if (!(f > 0.0) || opaque[c.pixel] > 0) continue;  // zero slope or fully hidden
            const Vec2 p{(c.pixel % w) + 0.5, (c.pixel / w) + 0.5};
            const Segment seg{verts[s][c.segment], verts[s][c.segment + 1]};
            const double t = closest_t(p, seg);
            const Vec2 q = seg.a + (seg.b - seg.a) * t;
            const double d = std::sqrt(dot(p - q, p - q));
            const double slope = stroke_coverage_slope(d, half, options.smoothing_px);
            if (slope == 0.0 || d <= 0.0) continue;
            // dL/dd = g * d(pixel)/d(coverage) * d(coverage)/dd
            const double dl_dd = g * -(product[c.pixel] / f) * slope;
            const Vec2 dir = (q - p) * (dl_dd / d);
            vgrad[c.segment] += dir * (1.0 - t);
            vgrad[c.segment + 1] += dir * t;
            any = true;
        }
        if (!any) continue;
        const int segs = options.flatten_segments;
        for (int i = 0; i <= segs; ++i) {
            const auto b = bernstein(static_cast<double>(i) / segs);
            for (int j = 0; j < 4; ++j) {
                grad.strokes[s][j].x += b[j] * vgrad[i].x * scale[0];
                grad.strokes[s][j].y += b[j] * vgrad[i].y * scale[1];
            }
        }
    }
    return grad;
}

}  // namespace strokeforge
