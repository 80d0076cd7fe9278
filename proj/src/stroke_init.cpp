#include "strokeforge/stroke_init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "strokeforge/error.hpp"
#include "strokeforge/rng.hpp"

namespace strokeforge {
namespace {

double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

std::int64_t dist2(PixelPoint a, PixelPoint b) {
    const std::int64_t dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::size_t distinct_count(const std::vector<PixelPoint>& points) {
    std::vector<std::pair<int, int>> v;
    v.reserve(points.size());
    for (auto p : points) v.emplace_back(p.y, p.x);
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

const AllocationEntry* AllocationPlan::find(int region_id) const {
    for (const auto& e : entries) {
        if (e.region_id == region_id) return &e;
    }
    return nullptr;
}

AllocationPlan allocate_strokes(const std::vector<RegionEdgeCount>& edge_counts, int total_strokes) {
    if (total_strokes < 1) throw DomainError("total stroke count must be at least 1");
    if (edge_counts.empty()) throw DomainError("stroke allocation needs at least one region");

    std::uint64_t sum = 0;
    std::size_t nonzero = 0;
    for (const auto& c : edge_counts) {
        sum += c.edge_count;
        nonzero += c.edge_count > 0 ? 1 : 0;
    }
    if (sum == 0) throw NoDrawableContent("no drawable content: every region has zero edge points");

    AllocationPlan plan;
    plan.total_strokes = total_strokes;
    const auto n = edge_counts.size();
    // count * N_s = quotient * sum + remainder, all exact in integers.
    std::vector<std::uint64_t> remainder(n);
    int assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = edge_counts[i];
        const std::uint64_t scaled = static_cast<std::uint64_t>(c.edge_count) * static_cast<std::uint64_t>(total_strokes);
        AllocationEntry e;
        e.region_id = c.region_id;
        e.edge_count = c.edge_count;
        e.ratio = static_cast<double>(c.edge_count) / static_cast<double>(sum);
        e.budget = static_cast<int>(scaled / sum);
        remainder[i] = scaled % sum;
        assigned += e.budget;
        plan.entries.push_back(e);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        if (edge_counts[a].edge_count != edge_counts[b].edge_count)
            return edge_counts[a].edge_count > edge_counts[b].edge_count;
        return edge_counts[a].region_id < edge_counts[b].region_id;
    });
    for (std::size_t i = 0; assigned < total_strokes; ++i, ++assigned) {
        ++plan.entries[order[i % n]].budget;
    }

    if (static_cast<std::size_t>(total_strokes) < nonzero) {
        plan.warnings.push_back("total of " + std::to_string(total_strokes) + " strokes is smaller than the " +
                                std::to_string(nonzero) + " regions with edges; some regions get no strokes");
        return plan;
    }

    // Rounding can starve a small region; move single strokes over from the
    // largest budgets until every region with edges draws something.
    std::vector<std::size_t> starved;
    for (std::size_t i = 0; i < n; ++i) {
        if (plan.entries[i].edge_count > 0 && plan.entries[i].budget == 0) starved.push_back(i);
    }
    std::sort(starved.begin(), starved.end(), [&](std::size_t a, std::size_t b) {
        if (edge_counts[a].edge_count != edge_counts[b].edge_count)
            return edge_counts[a].edge_count > edge_counts[b].edge_count;
        return edge_counts[a].region_id < edge_counts[b].region_id;
    });
    for (auto s : starved) {
        std::size_t donor = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (plan.entries[i].budget < 2) continue;
            if (donor == n || plan.entries[i].budget > plan.entries[donor].budget ||
                (plan.entries[i].budget == plan.entries[donor].budget &&
                 plan.entries[i].region_id < plan.entries[donor].region_id)) {
                donor = i;
            }
        }
        if (donor == n) break;
        --plan.entries[donor].budget;
        ++plan.entries[s].budget;
    }
    return plan;
}

std::vector<std::size_t> fps_indices(const std::vector<PixelPoint>& points, std::size_t k, FpsStart start) {
    if (points.empty()) throw DomainError("farthest point sampling over an empty point set");
    if (k < 1) throw DomainError("farthest point sampling needs k >= 1");
    if (k > distinct_count(points)) {
        throw DomainError("cannot select " + std::to_string(k) + " points from " +
                          std::to_string(distinct_count(points)) + " distinct points");
    }

    const std::size_t n = points.size();
    std::size_t first = 0;
    switch (start.rule) {
        case FpsStart::Rule::kFirst:
            first = 0;
            break;
        case FpsStart::Rule::kIndex:
            if (start.index >= n) throw DomainError("FPS start index out of range");
            first = start.index;
            break;
        case FpsStart::Rule::kCentroid: {
            double cx = 0.0, cy = 0.0;
            for (auto p : points) {
                cx += p.x;
                cy += p.y;
            }
            cx /= static_cast<double>(n);
            cy /= static_cast<double>(n);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double d = (points[i].x - cx) * (points[i].x - cx) + (points[i].y - cy) * (points[i].y - cy);
                if (d < best) {
                    best = d;
                    first = i;
                }
            }
            break;
        }
    }

    std::vector<std::size_t> selected{first};
    selected.reserve(k);
    std::vector<std::int64_t> nearest(n, std::numeric_limits<std::int64_t>::max());
    std::size_t last = first;
    while (selected.size() < k) {
        std::size_t best = n;
        std::int64_t best_d = -1;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], dist2(points[i], points[last]));
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        selected.push_back(best);
        last = best;
    }
    return selected;
}

std::vector<PixelPoint> fps(const std::vector<PixelPoint>& points, std::size_t k, FpsStart start) {
    std::vector<PixelPoint> out;
    for (auto i : fps_indices(points, k, start)) out.push_back(points[i]);
    return out;
}

std::vector<PixelPoint> sample_random(const std::vector<PixelPoint>& points, std::size_t k, std::uint64_t seed) {
    if (points.empty()) throw DomainError("random sampling over an empty point set");
    if (k > points.size()) throw DomainError("cannot sample more points than available");
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 g(keyed_seed({seed, 0x72616E64ull}));
    for (std::size_t i = 0; i < k; ++i) {
        const auto span = idx.size() - i;
        const auto j = i + static_cast<std::size_t>(unit_double(g) * static_cast<double>(span));
        std::swap(idx[i], idx[std::min(j, idx.size() - 1)]);
    }
    std::vector<PixelPoint> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(points[idx[i]]);
    return out;
}

double min_pairwise_distance(const std::vector<PixelPoint>& points) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, dist2(points[i], points[j]));
    }
    return points.size() < 2 ? std::numeric_limits<double>::infinity() : std::sqrt(static_cast<double>(best));
}

Sampler parse_sampler(const std::string& name) {
    if (name == "fps") return Sampler::kFps;
    if (name == "random") return Sampler::kRandom;
    throw ConfigError("unknown sampler '" + name + "' (expected fps or random)");
}

std::string to_string(Sampler s) { return s == Sampler::kFps ? "fps" : "random"; }

Vec2 pixel_center_normalized(PixelPoint p, int width, int height) {
    return {(p.x + 0.5) / width, (p.y + 0.5) / height};
}

SeedSet select_seeds(const EdgePointSet& edges, int budget, int width, int height, Sampler sampler,
                     std::uint64_t rng_seed) {
    SeedSet out;
    out.region_id = edges.region_id;
    if (budget <= 0) return out;
    if (edges.points.empty()) throw DomainError("cannot place strokes on a region without edge points");
    const auto want = static_cast<std::size_t>(budget);
    const auto k = std::min(want, edges.points.size());
    const auto picked = sampler == Sampler::kFps
                            ? fps(edges.points, k)
                            : sample_random(edges.points, k, keyed_seed({rng_seed, static_cast<std::uint64_t>(edges.region_id)}));
    // More strokes than edge points: wrap around the selection order.
    for (std::size_t i = 0; i < want; ++i) out.seeds.push_back(pixel_center_normalized(picked[i % k], width, height));
    return out;
}

std::vector<Stroke> init_strokes(const SeedSet& seeds, double radius, std::uint64_t rng_seed, double width,
                                 int round_id) {
    if (!(radius > 0.0)) throw DomainError("initialization radius must be positive");
    std::vector<Stroke> strokes;
    strokes.reserve(seeds.seeds.size());
    for (std::size_t i = 0; i < seeds.seeds.size(); ++i) {
        std::mt19937_64 g(keyed_seed({rng_seed, static_cast<std::uint64_t>(seeds.region_id), i}));
        Stroke s;
        s.width = width;
        s.round_id = round_id;
        s.control_points[0] = seeds.seeds[i];
        for (int j = 1; j < 4; ++j) {
            const double r = radius * std::sqrt(unit_double(g));
            const double theta = 2.0 * M_PI * unit_double(g);
            s.control_points[j] = seeds.seeds[i] + Vec2{r * std::cos(theta), r * std::sin(theta)};
        }
        strokes.push_back(s);
    }
    return strokes;
}

}  // namespace strokeforge
