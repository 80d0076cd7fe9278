#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/optimize.hpp"

namespace strokeforge {

nlohmann::json to_json(const RoundReport& round);
nlohmann::json to_json(const AllocationPlan& plan);

// report.json: canvas, config and hash, per-round budgets/iterations/losses,
// the allocation plan and warnings.
nlohmann::json session_report(const SessionResult& result, const SessionConfig& config);

// FPS against uniform random seed selection on one photo's edge points.
struct SamplingAblation {
    std::size_t edge_points = 0;
    int budget = 0;
    int trials = 0;
    double fps_min_distance = 0.0;
    std::vector<double> random_min_distances;
    int fps_wins = 0;  // trials where FPS's minimum spacing is strictly larger

    nlohmann::json to_json() const;
};

SamplingAblation run_sampling_ablation(const GrayImage& photo, int budget, int trials, std::uint64_t seed,
                                       const CannyThresholds& canny = {});

}  // namespace strokeforge
