#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strokeforge/image.hpp"

namespace strokeforge {

class PerceptualClient;

struct SsimConstants {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
    int window = 11;
    double sigma = 1.5;
};

// Mean SSIM over all fully-contained Gaussian windows.
double ssim(const GrayImage& a, const GrayImage& b, const SsimConstants& c = {});

// LPIPS from the perceptual service. Throws TransportError when unavailable.
double lpips(PerceptualClient& client, const RgbImage& a, const RgbImage& b);

struct EvalPair {
    std::string image_id;
    int strokes = 0;
    RgbImage photo;
    GrayImage sketch;  // render at the optimization canvas
};

struct EvalItem {
    std::string image_id;
    int strokes = 0;
    std::optional<double> ssim;
    std::optional<double> lpips;
    std::string error;  // empty when both requested metrics were computed
};

struct EvalReport {
    std::vector<EvalItem> items;
    std::optional<double> mean_ssim;
    std::optional<double> mean_lpips;
    int width = 0;
    int height = 0;

    // Columns image_id,strokes,ssim,lpips; missing values are written as NA.
    std::string to_csv() const;
    std::string to_json() const;
};

// SSIM is computed in parallel; LPIPS calls go through `client` one at a
// time. A failing item is recorded and the batch continues.
EvalReport evaluate_batch(const std::vector<EvalPair>& pairs, bool with_lpips,
                          std::shared_ptr<PerceptualClient> client = nullptr);

}  // namespace strokeforge
