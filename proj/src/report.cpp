#include "strokeforge/report.hpp"

#include "strokeforge/error.hpp"
#include "strokeforge/rng.hpp"
#include "strokeforge/stroke_init.hpp"
#include "strokeforge/svg.hpp"

namespace strokeforge {

nlohmann::json to_json(const RoundReport& r) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& s : r.loss_history) history.push_back({{"iteration", s.iteration}, {"clean_loss", s.clean_loss}});
    return {{"round_id", r.round_id},         {"region_id", r.region_id},   {"label", r.label},
            {"budget", r.budget},             {"iterations", r.iterations}, {"converged", r.converged},
            {"initial_loss", r.initial_loss}, {"final_loss", r.final_loss}, {"loss_history", history}};
}

nlohmann::json to_json(const AllocationPlan& plan) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : plan.entries) {
        entries.push_back(
            {{"region_id", e.region_id}, {"edge_count", e.edge_count}, {"ratio", e.ratio}, {"budget", e.budget}});
    }
    return {{"total_strokes", plan.total_strokes}, {"entries", entries}};
}

nlohmann::json session_report(const SessionResult& result, const SessionConfig& config) {
    nlohmann::json rounds = nlohmann::json::array(), budgets = nlohmann::json::array();
    for (const auto& r : result.rounds) {
        rounds.push_back(to_json(r));
        budgets.push_back(r.budget);
    }
    return {{"canvas", {result.sketch.canvas.width(), result.sketch.canvas.height()}},
            {"strokes", result.sketch.strokes.size()},
            {"seed", config.seed},
            {"config_hash", config_hash(config)},
            {"config", nlohmann::json::parse(config_json(config))},
            {"budgets", budgets},
            {"rounds", rounds},
            {"allocation", to_json(result.plan)},
            {"warnings", result.warnings}};
}

nlohmann::json SamplingAblation::to_json() const {
    return {{"edge_points", edge_points},
            {"budget", budget},
            {"trials", trials},
            {"fps_min_distance", fps_min_distance},
            {"random_min_distances", random_min_distances},
            {"fps_wins", fps_wins}};
}

SamplingAblation run_sampling_ablation(const GrayImage& photo, int budget, int trials, std::uint64_t seed,
                                       const CannyThresholds& canny) {
    if (budget < 2) throw DomainError("ablation needs a budget of at least 2 seeds");
    if (trials < 1) throw DomainError("ablation needs at least one trial");
    const auto edges = detect_edges(photo, RegionMask::global(photo.width, photo.height), canny);
    if (edges.points.size() < static_cast<std::size_t>(budget)) {
        throw NoDrawableContent("photo has " + std::to_string(edges.points.size()) + " edge points, fewer than the budget");
    }
    SamplingAblation out;
    out.edge_points = edges.points.size();
    out.budget = budget;
    out.trials = trials;
    const auto k = static_cast<std::size_t>(budget);
    out.fps_min_distance = min_pairwise_distance(fps(edges.points, k));
    for (int t = 0; t < trials; ++t) {
        const double d = min_pairwise_distance(sample_random(edges.points, k, keyed_seed({seed, static_cast<std::uint64_t>(t)})));
        out.random_min_distances.push_back(d);
        out.fps_wins += out.fps_min_distance > d;
    }
    return out;
}

}  // namespace strokeforge
