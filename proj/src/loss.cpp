#include "strokeforge/loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/error.hpp"
#include "strokeforge/perceptual_client.hpp"
#include "strokeforge/rng.hpp"

namespace strokeforge {
namespace {

constexpr std::array<double, 5> kBinomial{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
constexpr double kMinScale = 0.8;
constexpr double kMaxShift = 0.05;

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void require_same_shape(const GrayImage& a, const GrayImage& b) {
    if (!a.same_shape(b) || a.empty()) {
        throw DomainError("loss inputs must be non-empty and the same size (" + std::to_string(a.width) + "x" +
                          std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                          std::to_string(b.height) + ")");
    }
}

void require_finite(const GrayImage& g, const char* what) {
    for (double v : g.pixels) {
        if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
    }
}

// Bilinear taps for a sample at pixel-space position (sx, sy) with centres at +0.5.
struct Taps {
    int x0, y0;
    double fx, fy;
};

Taps taps_at(double sx, double sy) {
    const double ux = sx - 0.5, uy = sy - 0.5;
    const double flx = std::floor(ux), fly = std::floor(uy);
    return {static_cast<int>(flx), static_cast<int>(fly), ux - flx, uy - fly};
}

template <typename F>
void for_each_sample(int w, int h, const Augmentation& aug, F&& f) {
    const double cx = 0.5 * w, cy = 0.5 * h;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sx = cx + aug.scale * (x + 0.5 - cx) + aug.tx;
            const double sy = cy + aug.scale * (y + 0.5 - cy) + aug.ty;
            f(x, y, taps_at(sx, sy));
        }
    }
}

}  // namespace

LossBackendKind parse_backend(const std::string& name) {
    if (name == "builtin") return LossBackendKind::kBuiltin;
    if (name == "remote") return LossBackendKind::kRemote;
    throw ConfigError("unknown loss backend '" + name + "' (expected builtin or remote)");
}

std::string to_string(LossBackendKind kind) { return kind == LossBackendKind::kBuiltin ? "builtin" : "remote"; }

void LossConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
    if (augmentations_per_step < 0) throw ConfigError("augmentations_per_step must be >= 0");
    if (backend == LossBackendKind::kRemote && augmentations_per_step < 1) {
        throw ConfigError("the remote backend needs augmentations_per_step >= 1");
    }
    if (pyramid_levels < 1) throw ConfigError("pyramid_levels must be >= 1");
    if (clip_layer < 0) throw ConfigError("clip_layer must be >= 0");
}

CombinedLoss combine(double clip1, double clip2, double vgg, double lambda) {
    if (!std::isfinite(clip1) || !std::isfinite(clip2) || !std::isfinite(vgg) || !std::isfinite(lambda)) {
        throw NumericError("non-finite loss term");
    }
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    const double clip = clip1 + lambda * clip2;
    return {clip, clip + vgg};
}

GrayImage pyramid_down(const GrayImage& src) {
    const int w = src.width, h = src.height;
    const int ow = (w + 1) / 2, oh = (h + 1) / 2;
    GrayImage tmp(ow, h), out(ow, oh);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = -2; i <= 2; ++i) acc += kBinomial[i + 2] * src.at(clampi(2 * x + i, 0, w - 1), y);
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = -2; i <= 2; ++i) acc += kBinomial[i + 2] * tmp.at(x, clampi(2 * y + i, 0, h - 1));
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage pyramid_down_adjoint(const GrayImage& grad, int src_width, int src_height) {
    const int ow = (src_width + 1) / 2, oh = (src_height + 1) / 2;
    if (grad.width != ow || grad.height != oh) throw DomainError("pyramid adjoint shape mismatch");
    GrayImage tmp(ow, src_height, 0.0), out(src_width, src_height, 0.0);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int i = -2; i <= 2; ++i) tmp.at(x, clampi(2 * y + i, 0, src_height - 1)) += kBinomial[i + 2] * grad.at(x, y);
        }
    }
    for (int y = 0; y < src_height; ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int i = -2; i <= 2; ++i) out.at(clampi(2 * x + i, 0, src_width - 1), y) += kBinomial[i + 2] * tmp.at(x, y);
        }
    }
    return out;
}

std::pair<double, GrayImage> pyramid_loss(const GrayImage& a, const GrayImage& b, int levels) {
    require_same_shape(a, b);
    if (levels < 1) throw DomainError("pyramid_loss needs levels >= 1");

    std::vector<GrayImage> pa{a}, pb{b};
    for (int k = 1; k < levels; ++k) {
        pa.push_back(pyramid_down(pa.back()));
        pb.push_back(pyramid_down(pb.back()));
    }

    double loss = 0.0;
    GrayImage carry;
    for (int k = levels - 1; k >= 0; --k) {
        const auto& la = pa[k];
        const auto& lb = pb[k];
        const double n = static_cast<double>(la.size());
        GrayImage g(la.width, la.height);
        double level = 0.0;
        for (std::size_t i = 0; i < la.size(); ++i) {
            const double d = la.pixels[i] - lb.pixels[i];
            level += d * d;
            g.pixels[i] = 2.0 * d / n;
        }
        loss += level / n;
        if (!carry.empty()) {
            const auto up = pyramid_down_adjoint(carry, la.width, la.height);
            for (std::size_t i = 0; i < g.size(); ++i) g.pixels[i] += up.pixels[i];
        }
        carry = std::move(g);
    }
    return {loss, std::move(carry)};
}

Augmentation sample_augmentation(std::uint64_t seed, int index, int width, int height) {
    std::mt19937_64 g(keyed_seed({seed, static_cast<std::uint64_t>(index)}));
    std::uniform_real_distribution<double> scale(kMinScale, 1.0), shift(-kMaxShift, kMaxShift);
    Augmentation a;
    a.scale = scale(g);
    a.tx = shift(g) * width;
    a.ty = shift(g) * height;
    return a;
}

GrayImage augment(const GrayImage& image, const Augmentation& aug) {
    const int w = image.width, h = image.height;
    GrayImage out(w, h);
    const auto px = [&](int x, int y) { return (x < 0 || y < 0 || x >= w || y >= h) ? 1.0 : image.at(x, y); };
    for_each_sample(w, h, aug, [&](int x, int y, Taps t) {
        const double top = (1 - t.fx) * px(t.x0, t.y0) + t.fx * px(t.x0 + 1, t.y0);
        const double bot = (1 - t.fx) * px(t.x0, t.y0 + 1) + t.fx * px(t.x0 + 1, t.y0 + 1);
        out.at(x, y) = (1 - t.fy) * top + t.fy * bot;
    });
    return out;
}

GrayImage augment_adjoint(const GrayImage& grad, const Augmentation& aug) {
    const int w = grad.width, h = grad.height;
    GrayImage out(w, h, 0.0);
    const auto add = [&](int x, int y, double v) {
        if (x >= 0 && y >= 0 && x < w && y < h) out.at(x, y) += v;
    };
    for_each_sample(w, h, aug, [&](int x, int y, Taps t) {
        const double g = grad.at(x, y);
        add(t.x0, t.y0, (1 - t.fx) * (1 - t.fy) * g);
        add(t.x0 + 1, t.y0, t.fx * (1 - t.fy) * g);
        add(t.x0, t.y0 + 1, (1 - t.fx) * t.fy * g);
        add(t.x0 + 1, t.y0 + 1, t.fx * t.fy * g);
    });
    return out;
}

BuiltinLoss::BuiltinLoss(GrayImage target, LossConfig config) : target_(std::move(target)), config_(std::move(config)) {
    config_.validate();
    if (target_.empty()) throw DomainError("empty target image");
}

LossReport BuiltinLoss::evaluate(const GrayImage& sketch, int n_augment, std::uint64_t seed) {
    require_same_shape(sketch, target_);
    if (n_augment < 0) throw DomainError("n_augment must be >= 0");
    LossReport r;
    if (n_augment == 0) {
        auto [v, g] = pyramid_loss(sketch, target_, config_.pyramid_levels);
        r.vgg = v;
        r.pixel_grad = std::move(g);
    } else {
        r.pixel_grad = GrayImage(sketch.width, sketch.height, 0.0);
        for (int k = 0; k < n_augment; ++k) {
            const auto aug = sample_augmentation(seed, k, sketch.width, sketch.height);
            auto [v, g] = pyramid_loss(augment(sketch, aug), augment(target_, aug), config_.pyramid_levels);
            r.vgg += v / n_augment;
            const auto back = augment_adjoint(g, aug);
            for (std::size_t i = 0; i < back.size(); ++i) r.pixel_grad.pixels[i] += back.pixels[i] / n_augment;
        }
    }
    const auto c = combine(0.0, 0.0, r.vgg, config_.lambda);
    r.clip = c.clip;
    r.total = c.total;
    require_finite(r.pixel_grad, "pixel gradient");
    return r;
}

RemoteLoss::RemoteLoss(std::shared_ptr<PerceptualClient> client, const RgbImage& target, LossConfig config)
    : client_(std::move(client)), config_(std::move(config)) {
    config_.validate();
    if (!client_) throw ConfigError("remote loss backend needs a perceptual service client");
    target_id_ = client_->register_target(target);
}

LossReport RemoteLoss::evaluate(const GrayImage& sketch, int n_augment, std::uint64_t seed) {
    return client_->loss(target_id_, sketch, config_, n_augment, seed);
}

std::unique_ptr<LossBackend> make_loss_backend(const RgbImage& target, const LossConfig& config,
                                               std::shared_ptr<PerceptualClient> client) {
    if (config.backend == LossBackendKind::kBuiltin) {
        return std::make_unique<BuiltinLoss>(to_grayscale(target), config);
    }
    return std::make_unique<RemoteLoss>(std::move(client), target, config);
}

LossReport perceptual_loss(const GrayImage& sketch_image, const RgbImage& target_image, const LossConfig& config,
                           std::shared_ptr<PerceptualClient> client, std::uint64_t seed) {
    if (sketch_image.width != target_image.width || sketch_image.height != target_image.height) {
        throw DomainError("sketch and target images differ in size");
    }
    auto backend = make_loss_backend(target_image, config, std::move(client));
    return backend->evaluate(sketch_image, config.augmentations_per_step, seed);
}

double evaluate_clean(const Sketch& sketch, LossBackend& backend, const RenderOptions& options) {
    return backend.evaluate(render(sketch, sketch.canvas, options).image, 0, 0).total;
}

double evaluate_clean(const Sketch& sketch, const RgbImage& target, const LossConfig& config,
                      std::shared_ptr<PerceptualClient> client) {
    if (sketch.canvas.width() != target.width || sketch.canvas.height() != target.height) {
        throw DomainError("sketch canvas and target differ in size");
    }
    auto backend = make_loss_backend(target, config, std::move(client));
    return evaluate_clean(sketch, *backend);
}

}  // namespace strokeforge
