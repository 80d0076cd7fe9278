#include "strokeforge/session.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <random>

#include <httplib.h>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/error.hpp"
#include "strokeforge/image_io.hpp"
#include "strokeforge/region.hpp"
#include "strokeforge/report.hpp"
#include "strokeforge/svg.hpp"

namespace strokeforge {

std::string to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::kIdle: return "idle";
        case SessionStatus::kRunning: return "running";
        case SessionStatus::kConverged: return "converged";
        case SessionStatus::kFailed: return "failed";
    }
    return "unknown";
}

void ProgressLog::push(nlohmann::json record, std::vector<std::uint8_t> preview) {
    {
        std::lock_guard lock(mutex_);
        const std::size_t seq = entries_.size();
        const bool has_preview = !preview.empty();
        entries_.push_back({std::move(record), std::move(preview)});
        if (has_preview) {
            with_preview_.push_back(seq);
            if (with_preview_.size() > preview_window_) {
                const auto evict = with_preview_.size() - preview_window_;
                for (std::size_t i = 0; i < evict; ++i) {
                    entries_[with_preview_[i]].preview.clear();
                    entries_[with_preview_[i]].preview.shrink_to_fit();
                }
                with_preview_.erase(with_preview_.begin(), with_preview_.begin() + static_cast<std::ptrdiff_t>(evict));
            }
        }
    }
    changed_.notify_all();
}

std::size_t ProgressLog::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<std::string> ProgressLog::read(std::size_t& cursor, std::chrono::milliseconds wait) const {
    std::unique_lock lock(mutex_);
    if (cursor >= entries_.size() && wait.count() > 0) {
        changed_.wait_for(lock, wait, [&] { return cursor < entries_.size(); });
    }
    std::vector<std::string> lines;
    for (; cursor < entries_.size(); ++cursor) {
        auto rec = entries_[cursor].record;
        rec["seq"] = cursor;
        const auto& png = entries_[cursor].preview;
        if (!png.empty()) rec["preview_png"] = httplib::detail::base64_encode(std::string(png.begin(), png.end()));
        lines.push_back(rec.dump() + "\n");
    }
    return lines;
}

struct SessionManager::Session {
    std::string id;
    RgbImage photo;  // at canvas size
    int source_width = 0;
    int source_height = 0;
    SessionConfig config;
    std::unique_ptr<LossBackend> loss;

    mutable std::mutex mutex;
    std::vector<RegionMask> regions;
    std::set<int> used_regions;
    Sketch sketch;
    std::vector<RoundReport> rounds;
    AllocationPlan plan;
    std::vector<std::string> warnings;
    SessionStatus status = SessionStatus::kIdle;
    std::string error;
    std::thread worker;
    ProgressLog log;
};

SessionManager::SessionManager(std::shared_ptr<PerceptualClient> client) : client_(std::move(client)) {}

SessionManager::~SessionManager() {
    std::lock_guard lock(mutex_);
    for (auto& [id, s] : sessions_) {
        if (s->worker.joinable()) s->worker.join();
    }
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionNotFound("unknown session '" + id + "'");
    return it->second;
}

std::string SessionManager::create(const RgbImage& photo, const SessionConfig& config) {
    config.optim.validate();
    config.loss.validate();
    if (photo.empty()) throw DomainError("empty photo");
    auto s = std::make_shared<Session>();
    s->source_width = photo.width;
    s->source_height = photo.height;
    s->config = config;
    s->photo = io::resize(photo, config.canvas.width(), config.canvas.height());
    s->loss = make_loss_backend(s->photo, config.loss, client_);
    s->sketch.canvas = config.canvas;
    s->regions.push_back(RegionMask::global(config.canvas.width(), config.canvas.height()));
    s->regions.back().label = "global";

    std::random_device rd;
    char buf[40];
    std::lock_guard lock(mutex_);
    const std::uint64_t token = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ (next_id_++ << 48);
    std::snprintf(buf, sizeof buf, "%016" PRIx64, token);
    s->id = buf;
    sessions_[s->id] = s;
    return s->id;
}

int SessionManager::add_mask(const std::string& id, RegionMask mask) {
    auto s = find(id);
    const int cw = s->config.canvas.width(), ch = s->config.canvas.height();
    const bool source_size = mask.width == s->source_width && mask.height == s->source_height;
    if (!source_size && !(mask.width == cw && mask.height == ch)) {
        throw DomainError("mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                          ", expected the photo size " + std::to_string(s->source_width) + "x" +
                          std::to_string(s->source_height));
    }
    if (mask.width != cw || mask.height != ch) mask = io::resize(mask, cw, ch);
    mask.validate(cw, ch);
    std::lock_guard lock(s->mutex);
    mask.region_id = static_cast<int>(s->regions.size());
    s->regions.push_back(std::move(mask));
    return s->regions.back().region_id;
}

int SessionManager::add_polygon(const std::string& id, const std::vector<Vec2>& vertices, const std::string& label) {
    auto s = find(id);
    auto mask = rasterize_polygon(vertices, s->config.canvas.width(), s->config.canvas.height(), 0, label);
    std::lock_guard lock(s->mutex);
    mask.region_id = static_cast<int>(s->regions.size());
    s->regions.push_back(std::move(mask));
    return s->regions.back().region_id;
}

RoundTicket SessionManager::start_round(const std::string& id, std::optional<int> region_id,
                                        const RoundOverrides& overrides) {
    auto s = find(id);
    std::unique_lock lock(s->mutex);
    if (s->status == SessionStatus::kRunning) throw SessionBusy("a round is already running on session " + id);

    int region = 0;
    if (region_id) {
        region = *region_id;
    } else {
        while (region < static_cast<int>(s->regions.size()) && s->used_regions.count(region)) ++region;
    }
    if (region < 0 || region >= static_cast<int>(s->regions.size())) {
        throw DomainError("no region " + std::to_string(region) + " to run");
    }
    if (s->used_regions.count(region)) throw DomainError("region " + std::to_string(region) + " already has its round");
    if (s->rounds.empty() && region != 0) throw DomainError("the first round must use the global region 0");

    SessionConfig config = s->config;
    if (overrides.max_iters) config.optim.max_iters_per_round = *overrides.max_iters;
    if (overrides.eval_interval) config.optim.eval_interval = *overrides.eval_interval;
    if (overrides.freeze_previous) config.optim.retrain_previous_rounds = !*overrides.freeze_previous;
    if (overrides.masked_loss) config.optim.masked_loss = *overrides.masked_loss;
    config.optim.validate();

    auto regions = s->regions;
    auto planned = plan_regions(to_grayscale(s->photo), regions, config);
    const auto& entry = planned.plan.entries[static_cast<std::size_t>(region)];
    if (entry.edge_count == 0) throw DomainError("region " + std::to_string(region) + " has no edge points");
    if (entry.budget == 0) throw DomainError("region " + std::to_string(region) + " received no strokes");

    const RoundTicket ticket{s->sketch.rounds_completed, region, entry.budget};
    if (s->worker.joinable()) s->worker.join();
    s->status = SessionStatus::kRunning;
    s->error.clear();
    s->used_regions.insert(region);

    s->worker = std::thread([s, config, regions = std::move(regions), planned = std::move(planned), region, ticket] {
        Sketch sketch;
        {
            std::lock_guard l(s->mutex);
            sketch = s->sketch;
        }
        std::vector<std::string> warnings = planned.plan.warnings;
        const ProgressSink sink = [s](const ProgressEvent& e) {
            s->log.push({{"type", "progress"},
                         {"session_id", e.session_id},
                         {"round", e.round},
                         {"iteration", e.iteration},
                         {"clean_loss", e.clean_loss}},
                        e.preview_png);
        };
        nlohmann::json end{{"type", "round_end"}, {"round", ticket.round_id}, {"region_id", region}};
        try {
            auto report = run_region_round(sketch, planned, regions, static_cast<std::size_t>(region), config, *s->loss,
                                           warnings, sink, s->id);
            end["status"] = report->converged ? "converged" : "idle";
            end["iterations"] = report->iterations;
            end["final_loss"] = report->final_loss;
            s->log.push(end);
            std::lock_guard l(s->mutex);
            s->sketch = std::move(sketch);
            s->plan = planned.plan;
            s->warnings = warnings;
            s->status = report->converged ? SessionStatus::kConverged : SessionStatus::kIdle;
            s->rounds.push_back(std::move(*report));
        } catch (const std::exception& e) {
            end["status"] = "failed";
            end["error"] = e.what();
            s->log.push(end);
            std::lock_guard l(s->mutex);
            // The region may be retried after a failure.
            s->used_regions.erase(region);
            s->status = SessionStatus::kFailed;
            s->error = e.what();
        }
    });
    return ticket;
}

void SessionManager::wait(const std::string& id) {
    auto s = find(id);
    std::thread worker;
    {
        std::lock_guard lock(s->mutex);
        worker = std::move(s->worker);
    }
    if (worker.joinable()) worker.join();
}

SessionStatus SessionManager::status(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    return s->status;
}

bool SessionManager::running(const std::string& id) const { return status(id) == SessionStatus::kRunning; }

std::string SessionManager::sketch_svg(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    return export_svg(s->sketch, {s->config.seed, config_hash(s->config)});
}

nlohmann::json SessionManager::report(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    SessionResult r;
    r.sketch = s->sketch;
    r.plan = s->plan;
    r.rounds = s->rounds;
    r.warnings = s->warnings;
    auto j = session_report(r, s->config);
    j["session_id"] = s->id;
    j["status"] = to_string(s->status);
    if (!s->error.empty()) j["error"] = s->error;
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& m : s->regions) {
        regions.push_back({{"region_id", m.region_id}, {"label", m.label}, {"pixels", m.set_count()},
                           {"used", s->used_regions.count(m.region_id) > 0}});
    }
    j["regions"] = regions;
    return j;
}

const ProgressLog& SessionManager::progress(const std::string& id) const { return find(id)->log; }

}  // namespace strokeforge
