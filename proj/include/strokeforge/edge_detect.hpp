#pragma once

#include <cstddef>
#include <vector>

#include "strokeforge/geometry.hpp"
#include "strokeforge/image.hpp"

namespace strokeforge {

struct PixelPoint {
    int x = 0;
    int y = 0;
    bool operator==(const PixelPoint&) const = default;
};

// Edge pixels of one region, in row-major scan order.
struct EdgePointSet {
    std::vector<PixelPoint> points;
    int region_id = 0;
};

struct CannyThresholds {
    // Gradient-magnitude scale of an 8-bit image (0..255 input).
    double low = 20.0;
    double high = 200.0;
    // |gx| + |gy| by default, as the common Canny implementations do.
    bool l2_gradient = false;
};

// Luma 0.299 R + 0.587 G + 0.114 B, clamped to [0,1].
GrayImage to_grayscale(const RgbImage& image);

// Canny: 5x5 Gaussian (sigma 1.4), Sobel, non-maximum suppression, double
// threshold and hysteresis. Gradients outside `mask` are zeroed before
// suppression and pixels on the mask boundary are never reported.
EdgePointSet detect_edges(const GrayImage& image, const RegionMask& mask, const CannyThresholds& thresholds = {});

inline std::size_t edge_count(const EdgePointSet& edges) { return edges.points.size(); }

// Pixels whose 8-neighbourhood leaves the mask. Neighbours outside the
// image do not count.
std::vector<std::uint8_t> mask_boundary(const RegionMask& mask);

}  // namespace strokeforge
