#pragma once

#include <string>
#include <vector>

#include "strokeforge/geometry.hpp"

namespace strokeforge {

// Throws DomainError unless the polygon has >= 3 finite vertices, is simple
// and encloses a non-zero area. Vertices are normalized image coordinates.
void validate_polygon(const std::vector<Vec2>& vertices);

// Even-odd fill sampled at pixel centres ((x + 0.5) / W, (y + 0.5) / H).
// Throws DomainError for invalid polygons or ones that cover no pixel centre.
RegionMask rasterize_polygon(const std::vector<Vec2>& vertices, int width, int height, int region_id,
                             std::string label = {});

}  // namespace strokeforge
