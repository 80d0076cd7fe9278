#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "strokeforge/image.hpp"
#include "strokeforge/loss.hpp"

namespace strokeforge {

struct ServiceOptions {
    std::string url = "http://127.0.0.1:8765";
    std::chrono::milliseconds connect_timeout{5000};
    std::chrono::milliseconds read_timeout{120000};
    int max_attempts = 3;
    std::chrono::milliseconds retry_backoff{200};

    // STROKEFORGE_SERVICE_URL when set, otherwise the default above.
    static ServiceOptions from_env();
};

// Blocking client for the perceptual sidecar. Calls are serialized per client.
//
//   POST /targets  PNG bytes                 -> {"target_id": "..."}
//   POST /loss     frame(sketch)             -> frame(pixel_grad) with clip1, clip2, clip, vgg, total
//   POST /lpips    frame(image_a, image_b)   -> {"lpips": x}
//
// Connection failures and 503 are retried up to max_attempts; any other
// non-200 status raises TransportError carrying the status.
class PerceptualClient {
public:
    explicit PerceptualClient(ServiceOptions options = {});
    ~PerceptualClient();
    PerceptualClient(const PerceptualClient&) = delete;
    PerceptualClient& operator=(const PerceptualClient&) = delete;

    std::string register_target(const RgbImage& target);

    // Response scalars are checked against the ledger identity and the
    // cosine-distance range; violations raise TransportError.
    LossReport loss(const std::string& target_id, const GrayImage& sketch, const LossConfig& config, int n_augment,
                    std::uint64_t seed);

    double lpips(const RgbImage& a, const RgbImage& b);

    const ServiceOptions& options() const { return options_; }

private:
    struct Impl;
    ServiceOptions options_;
    std::unique_ptr<Impl> impl_;
    std::mutex mutex_;
};

}  // namespace strokeforge
