#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "strokeforge/geometry.hpp"
#include "strokeforge/image.hpp"
#include "strokeforge/raster.hpp"

namespace strokeforge {

class PerceptualClient;

enum class LossBackendKind { kBuiltin, kRemote };
LossBackendKind parse_backend(const std::string& name);
std::string to_string(LossBackendKind kind);

struct LossConfig {
    double lambda = 0.1;                 // weight of the intermediate CLIP layer term
    int clip_layer = 4;                  // intermediate vision-transformer layer l
    std::string vgg_layer = "block4";    // VGG16 feature: 4th conv block, post-activation
    int augmentations_per_step = 4;
    LossBackendKind backend = LossBackendKind::kBuiltin;
    int pyramid_levels = 4;              // builtin backend only

    // Throws ConfigError on lambda < 0 or a remote backend without augmentations.
    void validate() const;
};

// Per-step loss terms. Invariants: clip = clip1 + lambda * clip2,
// total = clip + vgg, all gradients finite.
struct LossReport {
    double clip1 = 0.0;
    double clip2 = 0.0;
    double clip = 0.0;
    double vgg = 0.0;
    double total = 0.0;
    GrayImage pixel_grad;  // d total / d sketch pixels
};

struct CombinedLoss {
    double clip = 0.0;
    double total = 0.0;
};

CombinedLoss combine(double clip1, double clip2, double vgg, double lambda);

// Sum over Gaussian pyramid levels of the mean squared difference, plus the
// gradient with respect to `a`.
std::pair<double, GrayImage> pyramid_loss(const GrayImage& a, const GrayImage& b, int levels);

// 5-tap binomial blur then 2x decimation, and its exact adjoint.
GrayImage pyramid_down(const GrayImage& src);
GrayImage pyramid_down_adjoint(const GrayImage& grad, int src_width, int src_height);

// Random affine crop shared by sketch and target: zoom in by 1/scale about
// the centre, then shift. Samples outside the image read white.
struct Augmentation {
    double scale = 1.0;  // in [0.8, 1]
    double tx = 0.0;     // pixels, |tx| <= 5% of width
    double ty = 0.0;
};

Augmentation sample_augmentation(std::uint64_t seed, int index, int width, int height);
GrayImage augment(const GrayImage& image, const Augmentation& aug);
GrayImage augment_adjoint(const GrayImage& grad, const Augmentation& aug);

// Objective against one fixed target photograph.
class LossBackend {
public:
    virtual ~LossBackend() = default;
    // n_augment == 0 evaluates the clean (un-augmented) loss.
    virtual LossReport evaluate(const GrayImage& sketch, int n_augment, std::uint64_t seed) = 0;
    virtual const LossConfig& config() const = 0;
};

// Model-free stand-in: the pyramid loss fills the vgg/total slots, clip terms are 0.
class BuiltinLoss final : public LossBackend {
public:
    BuiltinLoss(GrayImage target, LossConfig config);
    LossReport evaluate(const GrayImage& sketch, int n_augment, std::uint64_t seed) override;
    const LossConfig& config() const override { return config_; }

private:
    GrayImage target_;
    LossConfig config_;
};

// CLIP/VGG terms computed by the perceptual service.
class RemoteLoss final : public LossBackend {
public:
    RemoteLoss(std::shared_ptr<PerceptualClient> client, const RgbImage& target, LossConfig config);
    LossReport evaluate(const GrayImage& sketch, int n_augment, std::uint64_t seed) override;
    const LossConfig& config() const override { return config_; }
    const std::string& target_id() const { return target_id_; }

private:
    std::shared_ptr<PerceptualClient> client_;
    std::string target_id_;
    LossConfig config_;
};

// `client` is required for the remote backend and ignored otherwise.
std::unique_ptr<LossBackend> make_loss_backend(const RgbImage& target, const LossConfig& config,
                                               std::shared_ptr<PerceptualClient> client = nullptr);

// One-shot evaluation with config.augmentations_per_step augmentations.
LossReport perceptual_loss(const GrayImage& sketch_image, const RgbImage& target_image, const LossConfig& config,
                           std::shared_ptr<PerceptualClient> client = nullptr, std::uint64_t seed = 0);

// Loss of the rendered sketch without augmentation; what convergence is judged on.
double evaluate_clean(const Sketch& sketch, LossBackend& backend, const RenderOptions& options = {});
double evaluate_clean(const Sketch& sketch, const RgbImage& target, const LossConfig& config,
                      std::shared_ptr<PerceptualClient> client = nullptr);

}  // namespace strokeforge
