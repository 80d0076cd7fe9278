#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "strokeforge/loss.hpp"
#include "strokeforge/optimize.hpp"

namespace strokeforge {

class PerceptualClient;

class SessionNotFound : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A round is already running on the session.
class SessionBusy : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SessionStatus { kIdle, kRunning, kConverged, kFailed };
std::string to_string(SessionStatus status);

// Append-only record log with one producer and any number of readers.
// Every record is kept; PNG previews are kept only for the newest
// `preview_window` records that carry one, so a reader that falls behind
// sees older records without their preview.
class ProgressLog {
public:
    explicit ProgressLog(std::size_t preview_window = 8) : preview_window_(preview_window) {}

    void push(nlohmann::json record, std::vector<std::uint8_t> preview = {});
    std::size_t size() const;

    // Records from `cursor` on, as NDJSON lines ("seq" and, when still
    // buffered, "preview_png" in base64 are added). Waits up to `wait` for
    // new records when none are available; advances `cursor`.
    std::vector<std::string> read(std::size_t& cursor, std::chrono::milliseconds wait) const;

private:
    struct Entry {
        nlohmann::json record;
        std::vector<std::uint8_t> preview;
    };
    std::size_t preview_window_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> with_preview_;
};

struct RoundOverrides {
    std::optional<int> max_iters;
    std::optional<int> eval_interval;
    std::optional<bool> freeze_previous;
    std::optional<bool> masked_loss;
};

struct RoundTicket {
    int round_id = 0;
    int region_id = 0;
    int budget = 0;
};

// In-memory interactive sessions. Each session runs at most one round at a
// time on its own worker thread; distinct sessions run concurrently.
class SessionManager {
public:
    explicit SessionManager(std::shared_ptr<PerceptualClient> client = nullptr);
    ~SessionManager();
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    // The photo is resized to config.canvas; region 0 (global) is declared.
    std::string create(const RgbImage& photo, const SessionConfig& config);

    // Mask at the original photo size or the canvas size.
    int add_mask(const std::string& id, RegionMask mask);
    // Normalized polygon, rasterized at the canvas size.
    int add_polygon(const std::string& id, const std::vector<Vec2>& vertices, const std::string& label = {});

    // Plans over every region declared so far and starts the round for
    // `region_id` (default: the first region not yet run). Region 0 must go
    // first. Throws SessionBusy while another round runs.
    RoundTicket start_round(const std::string& id, std::optional<int> region_id = std::nullopt,
                            const RoundOverrides& overrides = {});
    void wait(const std::string& id);

    SessionStatus status(const std::string& id) const;
    std::string sketch_svg(const std::string& id) const;
    nlohmann::json report(const std::string& id) const;
    const ProgressLog& progress(const std::string& id) const;
    bool running(const std::string& id) const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;

    std::shared_ptr<PerceptualClient> client_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

}  // namespace strokeforge
