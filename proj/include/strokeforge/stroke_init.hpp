#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/geometry.hpp"

namespace strokeforge {

struct RegionEdgeCount {
    int region_id = 0;
    std::size_t edge_count = 0;
};

struct AllocationEntry {
    int region_id = 0;
    std::size_t edge_count = 0;
    double ratio = 0.0;
    int budget = 0;
};

struct AllocationPlan {
    int total_strokes = 0;
    std::vector<AllocationEntry> entries;
    std::vector<std::string> warnings;

    const AllocationEntry* find(int region_id) const;
};

// Splits `total_strokes` across regions in proportion to their edge counts.
// Budgets use largest-remainder rounding (ties: larger edge count, then lower
// region id) so they sum exactly to the total. When the total allows it,
// every region with edges receives at least one stroke.
AllocationPlan allocate_strokes(const std::vector<RegionEdgeCount>& edge_counts, int total_strokes);

struct FpsStart {
    enum class Rule { kCentroid, kFirst, kIndex };
    Rule rule = Rule::kCentroid;
    std::size_t index = 0;

    static FpsStart centroid() { return {}; }
    static FpsStart first() { return {Rule::kFirst, 0}; }
    static FpsStart at(std::size_t i) { return {Rule::kIndex, i}; }
};

// Greedy farthest point sampling under Euclidean pixel distance. Returns
// indices into `points` in selection order; ties go to the earlier point.
std::vector<std::size_t> fps_indices(const std::vector<PixelPoint>& points, std::size_t k,
                                     FpsStart start = FpsStart::centroid());
std::vector<PixelPoint> fps(const std::vector<PixelPoint>& points, std::size_t k,
                            FpsStart start = FpsStart::centroid());

// k distinct points drawn uniformly without replacement.
std::vector<PixelPoint> sample_random(const std::vector<PixelPoint>& points, std::size_t k, std::uint64_t seed);

double min_pairwise_distance(const std::vector<PixelPoint>& points);

enum class Sampler { kFps, kRandom };
Sampler parse_sampler(const std::string& name);
std::string to_string(Sampler s);

struct SeedSet {
    int region_id = 0;
    std::vector<Vec2> seeds;  // normalized, pixel centres
};

Vec2 pixel_center_normalized(PixelPoint p, int width, int height);

// Exactly `budget` seeds. A budget above the edge count cycles through the
// sampler's full selection order.
SeedSet select_seeds(const EdgePointSet& edges, int budget, int width, int height, Sampler sampler,
                     std::uint64_t rng_seed);

// One stroke per seed: P0 = seed, P1..P3 uniform in the disc of `radius`
// around P0. Generator keyed by (rng_seed, region_id, seed index).
std::vector<Stroke> init_strokes(const SeedSet& seeds, double radius, std::uint64_t rng_seed,
                                 double width = Stroke::kDefaultWidth, int round_id = 0);

}  // namespace strokeforge
