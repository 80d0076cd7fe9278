#include "strokeforge/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "strokeforge/error.hpp"
#include "strokeforge/image_io.hpp"
#include "strokeforge/rng.hpp"

namespace strokeforge {
namespace {

std::vector<double> pack(const Sketch& sk, std::size_t first) {
    const double w = sk.canvas.width(), h = sk.canvas.height();
    std::vector<double> p;
    p.reserve((sk.strokes.size() - first) * 8);
    for (std::size_t s = first; s < sk.strokes.size(); ++s) {
        for (auto c : sk.strokes[s].control_points) {
            p.push_back(c.x * w);
            p.push_back(c.y * h);
        }
    }
    return p;
}

// Writes back only coordinates that moved; x * w / w is not always x.
void unpack(const std::vector<double>& p, const std::vector<double>& before, Sketch& sk, std::size_t first) {
    const double w = sk.canvas.width(), h = sk.canvas.height();
    std::size_t i = 0;
    for (std::size_t s = first; s < sk.strokes.size(); ++s) {
        for (auto& c : sk.strokes[s].control_points) {
            if (p[i] != before[i]) c.x = p[i] / w;
            ++i;
            if (p[i] != before[i]) c.y = p[i] / h;
            ++i;
        }
    }
}

}  // namespace

void OptimConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (max_iters_per_round < 1) throw ConfigError("max_iters_per_round must be >= 1");
    if (eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
    if (!(convergence_eps > 0.0)) throw ConfigError("convergence_eps must be > 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
}

void RoundState::reset(std::vector<double> initial) {
    params = std::move(initial);
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
    step = 0;
    loss_history.clear();
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, RoundState& state,
               const OptimConfig& config, std::size_t stroke_offset) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw DomainError("adam_step: parameter, gradient and moment lengths differ");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericError("non-finite gradient for stroke " + std::to_string(i / 8 + stroke_offset));
        }
    }
    const long t = state.step + 1;
    const double b1 = config.adam_beta1, b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double mh = state.m[i] / c1, vh = state.v[i] / c2;
        params[i] -= config.learning_rate * mh / (std::sqrt(vh) + config.adam_eps);
    }
    state.step = t;
    if (&state.params != &params) state.params = params;
}

bool has_converged(const std::vector<LossSample>& history, double eps) {
    if (history.size() < 2) return false;
    return std::abs(history.back().clean_loss - history[history.size() - 2].clean_loss) < eps;
}

std::vector<std::uint8_t> preview_png(const GrayImage& render) {
    const int longer = std::max(render.width, render.height);
    const int w = std::max(1, static_cast<int>(std::lround(static_cast<double>(kPreviewSide) * render.width / longer)));
    const int h = std::max(1, static_cast<int>(std::lround(static_cast<double>(kPreviewSide) * render.height / longer)));
    return io::encode_png(io::resize(render, w, h));
}

RoundResult run_round(const Sketch& sketch, const std::vector<Stroke>& new_strokes, LossBackend& loss,
                      const OptimConfig& config, const RoundOptions& options) {
    config.validate();
    if (new_strokes.empty() && sketch.rounds_completed > 0) {
        throw DomainError("a refinement round needs at least one new stroke");
    }
    const Canvas canvas = sketch.canvas;
    if (config.masked_loss && options.region) options.region->validate(canvas.width(), canvas.height());

    RoundResult out;
    out.sketch = sketch;
    out.sketch.append_round(new_strokes);
    auto& work = out.sketch;
    const std::size_t first = config.retrain_previous_rounds ? 0 : sketch.strokes.size();
    if (first == work.strokes.size()) throw DomainError("round has no trainable strokes");

    auto& st = out.state;
    st.round_id = sketch.rounds_completed;
    st.reset(pack(work, first));
    const int n_aug = loss.config().augmentations_per_step;
    const auto round_key = static_cast<std::uint64_t>(st.round_id);

    const auto evaluate = [&](int iteration) {
        const auto img = render(work, canvas, options.render).image;
        const double clean = loss.evaluate(img, 0, 0).total;
        st.loss_history.push_back({iteration, clean});
        if (options.progress) {
            options.progress({options.session_id, st.round_id, iteration, clean, preview_png(img)});
        }
    };

    std::vector<double> grads(st.params.size());
    int it = 0;
    for (; it < config.max_iters_per_round; ++it) {
        if (it % config.eval_interval == 0) {
            evaluate(it);
            if (has_converged(st.loss_history, config.convergence_eps)) {
                out.converged = true;
                break;
            }
        }
        const auto img = render(work, canvas, options.render).image;
        auto report = loss.evaluate(img, n_aug, keyed_seed({options.seed, round_key, static_cast<std::uint64_t>(it)}));
        if (config.masked_loss && options.region) {
            for (int y = 0; y < canvas.height(); ++y)
                for (int x = 0; x < canvas.width(); ++x)
                    if (!options.region->test(x, y)) report.pixel_grad.at(x, y) = 0.0;
        }
        const auto g = render_backward(work, canvas, report.pixel_grad, options.render);
        std::size_t k = 0;
        for (std::size_t s = first; s < work.strokes.size(); ++s) {
            for (auto p : g.strokes[s]) {
                grads[k++] = p.x / canvas.width();
                grads[k++] = p.y / canvas.height();
            }
        }
        const auto before = st.params;
        adam_step(st.params, grads, st, config, first);
        unpack(st.params, before, work, first);
    }
    if (!out.converged && (st.loss_history.empty() || st.loss_history.back().iteration != it)) {
        evaluate(it);
        out.converged = has_converged(st.loss_history, config.convergence_eps);
    }
    out.iterations = static_cast<int>(st.step);
    out.initial_loss = st.loss_history.front().clean_loss;
    out.final_loss = st.loss_history.back().clean_loss;
    return out;
}

RegionEdges plan_regions(const GrayImage& photo, const std::vector<RegionMask>& regions, const SessionConfig& config) {
    if (regions.empty()) throw DomainError("at least the global region is required");
    const auto& global = regions.front();
    global.validate(photo.width, photo.height);
    if (global.set_count() != global.bits.size()) throw DomainError("regions[0] must be the all-ones global mask");

    RegionEdges out;
    std::vector<RegionEdgeCount> counts;
    for (const auto& r : regions) {
        out.edges.push_back(detect_edges(photo, r, config.canny));
        counts.push_back({r.region_id, edge_count(out.edges.back())});
    }
    out.plan = allocate_strokes(counts, config.total_strokes);
    return out;
}

std::vector<Stroke> initial_strokes(const EdgePointSet& edges, int budget, const Canvas& canvas,
                                    const SessionConfig& config, int round_id) {
    const auto seeds = select_seeds(edges, budget, canvas.width(), canvas.height(), config.sampler, config.seed);
    return init_strokes(seeds, config.init_radius, config.seed, config.stroke_width, round_id);
}

std::optional<RoundReport> run_region_round(Sketch& sketch, const RegionEdges& planned,
                                            const std::vector<RegionMask>& regions, std::size_t index,
                                            const SessionConfig& config, LossBackend& loss,
                                            std::vector<std::string>& warnings, const ProgressSink& progress,
                                            const std::string& session_id) {
    if (index >= regions.size() || index >= planned.plan.entries.size()) throw DomainError("region index out of range");
    const auto& region = regions[index];
    const auto& entry = planned.plan.entries[index];
    if (entry.edge_count == 0 || entry.budget == 0) {
        warnings.push_back("region " + std::to_string(region.region_id) +
                           (entry.edge_count == 0 ? " has no edge points" : " received no strokes") + "; skipped");
        return std::nullopt;
    }
    const int round_id = sketch.rounds_completed;
    const auto strokes = initial_strokes(planned.edges[index], entry.budget, sketch.canvas, config, round_id);
    RoundOptions opts;
    opts.seed = config.seed;
    opts.session_id = session_id;
    opts.region = &region;
    opts.progress = progress;
    auto r = run_round(sketch, strokes, loss, config.optim, opts);
    sketch = std::move(r.sketch);
    return RoundReport{round_id,      region.region_id, region.label,   entry.budget,
                       r.iterations,  r.converged,      r.initial_loss, r.final_loss,
                       std::move(r.state.loss_history)};
}

SessionResult run_session(const RgbImage& photo, const std::vector<RegionMask>& regions, const SessionConfig& config,
                          LossBackend& loss, const ProgressSink& progress, const std::string& session_id) {
    config.optim.validate();
    const auto planned = plan_regions(to_grayscale(photo), regions, config);

    SessionResult out;
    out.plan = planned.plan;
    out.warnings = planned.plan.warnings;
    out.sketch.canvas = Canvas(photo.width, photo.height);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (auto r = run_region_round(out.sketch, planned, regions, i, config, loss, out.warnings, progress, session_id)) {
            out.rounds.push_back(std::move(*r));
        }
    }
    return out;
}

}  // namespace strokeforge
