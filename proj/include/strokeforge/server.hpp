#pragma once

#include <map>
#include <memory>
#include <string>

#include "strokeforge/optimize.hpp"
#include "strokeforge/session.hpp"

namespace strokeforge {

// Session settings from query parameters: strokes, seed, backend,
// canny_low, canny_high, init_radius, sampler, freeze_previous, canvas
// ("224" or "WxH"), lambda, augmentations, max_iters, eval_interval.
// Unknown keys and bad values throw ConfigError.
SessionConfig config_from_params(const std::multimap<std::string, std::string>& params, SessionConfig base = {});

Canvas parse_canvas(const std::string& spec);

// HTTP front end over a SessionManager.
//
//   POST /sessions                  photo bytes, config in the query    -> 201 {"session_id"}
//   POST /sessions/{id}/regions     mask image bytes, or JSON
//                                   {"polygon": [[x, y], ...], "label"}  -> 201 {"region_id"}
//   POST /sessions/{id}/rounds      JSON {"region_id", "max_iters", "eval_interval",
//                                   "freeze_previous", "masked_loss"}   -> 202 {"round_id", "region_id", "budget"}
//   GET  /sessions/{id}             status summary
//   GET  /sessions/{id}/progress    NDJSON stream, ends once no round is running
//   GET  /sessions/{id}/sketch.svg
//   GET  /sessions/{id}/report
//
// Errors are JSON {"error"}: 400 bad config, 404 unknown session,
// 409 round already running, 422 invalid image/mask/polygon/region,
// 502 perceptual service failure.
class SketchServer {
public:
    explicit SketchServer(SessionManager& sessions, SessionConfig defaults = {});
    ~SketchServer();

    // port 0 picks a free port; returns the bound port or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    bool listen();
    void stop();
    void wait_until_ready();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace strokeforge
