#include "strokeforge/edge_detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "strokeforge/error.hpp"

namespace strokeforge {
namespace {

constexpr double kBlurSigma = 1.4;
constexpr int kBlurRadius = 2;
const double kTan22 = std::tan(M_PI / 8.0);
const double kTan67 = std::tan(3.0 * M_PI / 8.0);

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

std::array<double, 2 * kBlurRadius + 1> gaussian_kernel() {
    std::array<double, 2 * kBlurRadius + 1> k{};
    double sum = 0.0;
    for (int i = -kBlurRadius; i <= kBlurRadius; ++i) {
        k[i + kBlurRadius] = std::exp(-(i * i) / (2.0 * kBlurSigma * kBlurSigma));
        sum += k[i + kBlurRadius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable 5x5 blur, replicated border.
std::vector<double> blur(const std::vector<double>& src, int w, int h) {
    const auto k = gaussian_kernel();
    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kBlurRadius; i <= kBlurRadius; ++i) {
                acc += k[i + kBlurRadius] * src[static_cast<std::size_t>(y) * w + clampi(x + i, 0, w - 1)];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kBlurRadius; i <= kBlurRadius; ++i) {
                acc += k[i + kBlurRadius] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

GrayImage to_grayscale(const RgbImage& image) {
    if (image.empty() || image.width <= 0 || image.height <= 0) {
        throw DomainError("cannot convert an empty image to grayscale");
    }
    GrayImage g(image.width, image.height);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) {
        const double r = image.pixels[3 * i], gr = image.pixels[3 * i + 1], b = image.pixels[3 * i + 2];
        if (r == gr && gr == b) {
            g.pixels[i] = std::clamp(r, 0.0, 1.0);
            continue;
        }
        const double v = (299.0 * r + 587.0 * gr + 114.0 * b) / 1000.0;
        g.pixels[i] = std::clamp(v, 0.0, 1.0);
    }
    return g;
}

std::vector<std::uint8_t> mask_boundary(const RegionMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::uint8_t> boundary(mask.bits.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.test(x, y)) continue;
            bool edge = false;
            for (int dy = -1; dy <= 1 && !edge; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (!mask.test(nx, ny)) {
                        edge = true;
                        break;
                    }
                }
            }
            boundary[static_cast<std::size_t>(y) * w + x] = edge ? 1 : 0;
        }
    }
    return boundary;
}

EdgePointSet detect_edges(const GrayImage& image, const RegionMask& mask, const CannyThresholds& th) {
    if (!(th.low < th.high)) {
        throw ConfigError("canny low threshold must be below the high threshold");
    }
    if (image.empty()) throw DomainError("edge detection on an empty image");
    mask.validate(image.width, image.height);

    const int w = image.width, h = image.height;
    const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

    std::vector<double> scaled(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), scaled.begin(), [](double v) { return v * 255.0; });
    const auto smooth = blur(scaled, w, h);

    std::vector<double> gx(smooth.size()), gy(smooth.size()), mag(smooth.size());
    for (int y = 0; y < h; ++y) {
        const int ym = clampi(y - 1, 0, h - 1), yp = clampi(y + 1, 0, h - 1);
        for (int x = 0; x < w; ++x) {
            if (!mask.test(x, y)) continue;
            const int xm = clampi(x - 1, 0, w - 1), xp = clampi(x + 1, 0, w - 1);
            const auto s = [&](int xx, int yy) { return smooth[idx(xx, yy)]; };
            const double dx = (s(xp, ym) + 2.0 * s(xp, y) + s(xp, yp)) - (s(xm, ym) + 2.0 * s(xm, y) + s(xm, yp));
            const double dy = (s(xm, yp) + 2.0 * s(x, yp) + s(xp, yp)) - (s(xm, ym) + 2.0 * s(x, ym) + s(xp, ym));
            gx[idx(x, y)] = dx;
            gy[idx(x, y)] = dy;
            mag[idx(x, y)] = th.l2_gradient ? std::hypot(dx, dy) : std::abs(dx) + std::abs(dy);
        }
    }

    const auto m_at = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return mag[idx(x, y)];
    };

    // 0 = none, 1 = weak candidate, 2 = strong
    std::vector<std::uint8_t> state(mag.size(), 0);
    std::vector<PixelPoint> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = mag[idx(x, y)];
            if (!(m > th.low)) continue;
            const double ax = std::abs(gx[idx(x, y)]), ay = std::abs(gy[idx(x, y)]);
            bool keep;
            // Asymmetric comparisons break plateaus toward the lower index.
            if (ay < ax * kTan22) {
                keep = m > m_at(x - 1, y) && m >= m_at(x + 1, y);
            } else if (ay > ax * kTan67) {
                keep = m > m_at(x, y - 1) && m >= m_at(x, y + 1);
            } else {
                const int s = (gx[idx(x, y)] < 0) != (gy[idx(x, y)] < 0) ? -1 : 1;
                keep = m > m_at(x - s, y - 1) && m > m_at(x + s, y + 1);
            }
            if (!keep) continue;
            if (m > th.high) {
                state[idx(x, y)] = 2;
                stack.push_back({x, y});
            } else {
                state[idx(x, y)] = 1;
            }
        }
    }

    while (!stack.empty()) {
        const auto p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = p.x + dx, ny = p.y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                if (state[idx(nx, ny)] == 1) {
                    state[idx(nx, ny)] = 2;
                    stack.push_back({nx, ny});
                }
            }
        }
    }

    const auto boundary = mask_boundary(mask);
    EdgePointSet out;
    out.region_id = mask.region_id;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (state[idx(x, y)] == 2 && mask.test(x, y) && !boundary[idx(x, y)]) out.points.push_back({x, y});
        }
    }
    return out;
}

}  // namespace strokeforge
