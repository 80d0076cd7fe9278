#include "strokeforge/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/error.hpp"
#include "strokeforge/perceptual_client.hpp"

namespace strokeforge {
namespace {

std::vector<double> gaussian_window(int n, double sigma) {
    std::vector<double> k(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = i - (n - 1) / 2.0;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable "valid" filtering: output is (w-n+1) x (h-n+1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1, oh = h - n + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h), out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    return out;
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

double ssim(const GrayImage& a, const GrayImage& b, const SsimConstants& c) {
    if (!a.same_shape(b)) throw DomainError("ssim inputs differ in size");
    if (a.width < c.window || a.height < c.window) {
        throw DomainError("ssim needs images of at least " + std::to_string(c.window) + " px per side");
    }
    const auto k = gaussian_window(c.window, c.sigma);
    const int w = a.width, h = a.height;
    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a.pixels[i] * a.pixels[i];
        bb[i] = b.pixels[i] * b.pixels[i];
        ab[i] = a.pixels[i] * b.pixels[i];
    }
    const auto mu_a = filter_valid(a.pixels, w, h, k), mu_b = filter_valid(b.pixels, w, h, k);
    const auto e_aa = filter_valid(aa, w, h, k), e_bb = filter_valid(bb, w, h, k), e_ab = filter_valid(ab, w, h, k);
    const double c1 = std::pow(c.k1 * c.dynamic_range, 2), c2 = std::pow(c.k2 * c.dynamic_range, 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double va = e_aa[i] - mu_a[i] * mu_a[i];
        const double vb = e_bb[i] - mu_b[i] * mu_b[i];
        const double cov = e_ab[i] - mu_a[i] * mu_b[i];
        sum += ((2 * mu_a[i] * mu_b[i] + c1) * (2 * cov + c2)) /
               ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    return sum / static_cast<double>(mu_a.size());
}

double lpips(PerceptualClient& client, const RgbImage& a, const RgbImage& b) { return client.lpips(a, b); }

EvalReport evaluate_batch(const std::vector<EvalPair>& pairs, bool with_lpips, std::shared_ptr<PerceptualClient> client) {
    if (pairs.empty()) throw DomainError("evaluate_batch needs at least one pair");
    EvalReport report;
    report.width = pairs.front().sketch.width;
    report.height = pairs.front().sketch.height;
    report.items.resize(pairs.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < pairs.size(); i = next++) {
            const auto& p = pairs[i];
            auto& item = report.items[i];
            item.image_id = p.image_id;
            item.strokes = p.strokes;
            try {
                item.ssim = ssim(to_grayscale(p.photo), p.sketch);
            } catch (const std::exception& e) {
                item.error = std::string("ssim: ") + e.what();
            }
        }
    };
    const unsigned n = std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u, 8u);
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < std::min<std::size_t>(n, pairs.size()); ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    if (with_lpips) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            auto& item = report.items[i];
            try {
                if (!client) throw TransportError("no perceptual service configured");
                item.lpips = client->lpips(pairs[i].photo, gray_to_rgb(pairs[i].sketch));
            } catch (const std::exception& e) {
                item.error += (item.error.empty() ? "" : "; ") + std::string("lpips unavailable: ") + e.what();
            }
        }
    }

    double ssum = 0.0, lsum = 0.0;
    int sn = 0, ln = 0;
    for (const auto& item : report.items) {
        if (item.ssim) ssum += *item.ssim, ++sn;
        if (item.lpips) lsum += *item.lpips, ++ln;
    }
    if (sn) report.mean_ssim = ssum / sn;
    if (ln) report.mean_lpips = lsum / ln;
    return report;
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "image_id,strokes,ssim,lpips\n";
    for (const auto& item : items) {
        out << csv_field(item.image_id) << ',' << item.strokes << ',' << fmt(item.ssim) << ',' << fmt(item.lpips)
            << '\n';
    }
    return out.str();
}

std::string EvalReport::to_json() const {
    using nlohmann::json;
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["width"] = width;
    j["height"] = height;
    j["mean_ssim"] = opt(mean_ssim);
    j["mean_lpips"] = opt(mean_lpips);
    j["items"] = json::array();
    for (const auto& item : items) {
        json e{{"image_id", item.image_id}, {"strokes", item.strokes}, {"ssim", opt(item.ssim)},
               {"lpips", opt(item.lpips)}};
        if (!item.error.empty()) e["error"] = item.error;
        j["items"].push_back(e);
    }
    return j.dump(2);
}

}  // namespace strokeforge
