#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/geometry.hpp"
#include "strokeforge/image.hpp"
#include "strokeforge/loss.hpp"
#include "strokeforge/raster.hpp"
#include "strokeforge/stroke_init.hpp"

namespace strokeforge {

struct OptimConfig {
    double learning_rate = 1.0;  // in pixels
    int max_iters_per_round = 800;
    int eval_interval = 10;
    double convergence_eps = 1e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    bool retrain_previous_rounds = true;
    // Experimental: drop loss gradient outside the round's region.
    bool masked_loss = false;

    void validate() const;
};

struct LossSample {
    int iteration = 0;
    double clean_loss = 0.0;

    bool operator==(const LossSample&) const = default;
};

struct RoundState {
    int round_id = 0;
    std::vector<double> params;
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
    std::vector<LossSample> loss_history;

    void reset(std::vector<double> initial);
};

// One bias-corrected Adam update of params (and state.params mirrors it).
// A non-finite gradient leaves everything untouched and throws NumericError
// naming stroke (index / 8 + stroke_offset).
void adam_step(std::vector<double>& params, const std::vector<double>& grads, RoundState& state,
               const OptimConfig& config, std::size_t stroke_offset = 0);

// True when the last two clean-loss evaluations differ by less than eps.
bool has_converged(const std::vector<LossSample>& history, double eps);

struct ProgressEvent {
    std::string session_id;
    int round = 0;
    int iteration = 0;
    double clean_loss = 0.0;
    std::vector<std::uint8_t> preview_png;  // 112 px on the longer side
};

using ProgressSink = std::function<void(const ProgressEvent&)>;

inline constexpr int kPreviewSide = 112;
std::vector<std::uint8_t> preview_png(const GrayImage& render);

struct RoundOptions {
    std::uint64_t seed = 0;
    std::string session_id;
    const RegionMask* region = nullptr;  // used by masked_loss
    ProgressSink progress;
    RenderOptions render;
};

struct RoundResult {
    Sketch sketch;
    RoundState state;
    int iterations = 0;  // optimizer steps taken
    bool converged = false;
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

// Appends `new_strokes` (round_id = sketch.rounds_completed) and optimizes.
// The input sketch is never modified, so a failed round leaves the caller's
// state as it was.
RoundResult run_round(const Sketch& sketch, const std::vector<Stroke>& new_strokes, LossBackend& loss,
                      const OptimConfig& config, const RoundOptions& options = {});

struct SessionConfig {
    // Photos and masks are resized to this by the CLI and the server;
    // run_session itself works at the photo's size.
    Canvas canvas;
    int total_strokes = 32;
    std::uint64_t seed = 0;
    double init_radius = 0.05;
    double stroke_width = Stroke::kDefaultWidth;
    Sampler sampler = Sampler::kFps;
    CannyThresholds canny;
    OptimConfig optim;
    LossConfig loss;
};

struct RoundReport {
    int round_id = 0;
    int region_id = 0;
    std::string label;
    int budget = 0;
    int iterations = 0;
    bool converged = false;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<LossSample> loss_history;
};

struct RegionEdges {
    std::vector<EdgePointSet> edges;  // parallel to the region list
    AllocationPlan plan;
};

// Canny per region and the stroke budget split over every region given.
RegionEdges plan_regions(const GrayImage& photo, const std::vector<RegionMask>& regions, const SessionConfig& config);

// Seeds and initial strokes for one region's budget.
std::vector<Stroke> initial_strokes(const EdgePointSet& edges, int budget, const Canvas& canvas,
                                    const SessionConfig& config, int round_id);

// Runs the round for regions[index] using a plan over `regions`, appending
// to `sketch`. Returns nothing (and adds a warning) when the region has no
// edges or no budget.
std::optional<RoundReport> run_region_round(Sketch& sketch, const RegionEdges& planned,
                                            const std::vector<RegionMask>& regions, std::size_t index,
                                            const SessionConfig& config, LossBackend& loss,
                                            std::vector<std::string>& warnings, const ProgressSink& progress = {},
                                            const std::string& session_id = {});

struct SessionResult {
    Sketch sketch;
    AllocationPlan plan;
    std::vector<RoundReport> rounds;
    std::vector<std::string> warnings;
};

// regions[0] must be the all-ones global mask. Regions are processed in
// order; one with no edges or no budget is skipped with a warning.
SessionResult run_session(const RgbImage& photo, const std::vector<RegionMask>& regions, const SessionConfig& config,
                          LossBackend& loss, const ProgressSink& progress = {}, const std::string& session_id = {});

}  // namespace strokeforge
