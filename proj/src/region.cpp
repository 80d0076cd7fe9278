#include "strokeforge/region.hpp"

#include <algorithm>
#include <cmath>

#include "strokeforge/error.hpp"

namespace strokeforge {
namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
    return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) || (o3 == 0 && on_segment(c, d, a)) ||
           (o4 == 0 && on_segment(c, d, b));
}

}  // namespace

void validate_polygon(const std::vector<Vec2>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw DomainError("polygon needs at least 3 vertices, got " + std::to_string(n));
    for (auto p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("polygon vertex is not finite");
    }
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) area2 += v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y;
    if (area2 == 0.0) throw DomainError("polygon has zero area");

    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            const Vec2 c = v[j], d = v[(j + 1) % n];
            if (adjacent) {
                // Neighbours share one vertex; they may not fold back over each other.
                const Vec2 shared = j == i + 1 ? b : a;
                const Vec2 p = j == i + 1 ? a : b, q = j == i + 1 ? d : c;
                if (orient(shared, p, q) == 0 && (on_segment(shared, p, q) || on_segment(shared, q, p))) {
                    throw DomainError("polygon edges " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
                }
                continue;
            }
            if (segments_touch(a, b, c, d)) {
                throw DomainError("polygon is self-intersecting (edges " + std::to_string(i) + " and " +
                                  std::to_string(j) + ")");
            }
        }
    }
}

RegionMask rasterize_polygon(const std::vector<Vec2>& vertices, int width, int height, int region_id,
                             std::string label) {
    validate_polygon(vertices);
    if (width < 1 || height < 1) throw DomainError("mask size must be positive");
    RegionMask m;
    m.width = width;
    m.height = height;
    m.region_id = region_id;
    m.label = std::move(label);
    m.bits.assign(static_cast<std::size_t>(width) * height, 0);

    std::vector<Vec2> px;
    for (auto p : vertices) px.push_back({p.x * width, p.y * height});
    const std::size_t n = px.size();
    std::vector<double> crossings;
    for (int y = 0; y < height; ++y) {
        const double cy = y + 0.5;
        crossings.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = px[i], b = px[(i + 1) % n];
            // Half-open in y so a vertex on the scanline is counted once.
            if ((a.y <= cy) != (b.y <= cy)) crossings.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
            // Pixel centres strictly left of a crossing are outside it.
            const int x0 = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
            const int x1 = std::min(width, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)));
            for (int x = x0; x < x1; ++x) m.bits[static_cast<std::size_t>(y) * width + x] = 1;
        }
    }
    if (m.set_count() == 0) throw DomainError("polygon covers no pixel centre");
    return m;
}

}  // namespace strokeforge
