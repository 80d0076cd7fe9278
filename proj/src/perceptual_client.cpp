#include "strokeforge/perceptual_client.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "strokeforge/error.hpp"
#include "strokeforge/image_io.hpp"
#include "strokeforge/wire.hpp"

namespace strokeforge {
namespace {

constexpr double kLedgerTolerance = 1e-6;

std::string describe_failure(const httplib::Result& res) {
    try {
        const auto body = nlohmann::json::parse(res->body);
        if (body.contains("error")) return body["error"].get<std::string>();
    } catch (const std::exception&) {
    }
    return res->body.substr(0, 200);
}

double scalar(const nlohmann::json& h, const char* key) {
    if (!h.contains(key) || !h[key].is_number()) {
        throw TransportError(std::string("loss response lacks numeric '") + key + "'");
    }
    return h[key].get<double>();
}

}  // namespace

ServiceOptions ServiceOptions::from_env() {
    ServiceOptions o;
    if (const char* url = std::getenv("STROKEFORGE_SERVICE_URL"); url && *url) o.url = url;
    return o;
}

struct PerceptualClient::Impl {
    httplib::Client http;

    explicit Impl(const ServiceOptions& o) : http(o.url) {
        http.set_connection_timeout(o.connect_timeout);
        http.set_read_timeout(o.read_timeout);
        http.set_write_timeout(o.read_timeout);
    }

    std::string post(const ServiceOptions& o, const std::string& path, const std::string& body,
                     const std::string& content_type) {
        const int attempts = o.max_attempts < 1 ? 1 : o.max_attempts;
        std::string last_error;
        for (int attempt = 1; attempt <= attempts; ++attempt) {
            auto res = http.Post(path, body, content_type);
            if (res && res->status == 200) return res->body;
            if (res && res->status != 503) {
                throw TransportError("perceptual service " + path + " returned " + std::to_string(res->status) +
                                         ": " + describe_failure(res),
                                     res->status);
            }
            last_error = res ? "status 503" : httplib::to_string(res.error());
            if (attempt < attempts) std::this_thread::sleep_for(o.retry_backoff * attempt);
        }
        throw TransportError("perceptual service " + o.url + path + " unavailable after " + std::to_string(attempts) +
                             " attempts: " + last_error);
    }
};

PerceptualClient::PerceptualClient(ServiceOptions options)
    : options_(std::move(options)), impl_(std::make_unique<Impl>(options_)) {}

PerceptualClient::~PerceptualClient() = default;

std::string PerceptualClient::register_target(const RgbImage& target) {
    const auto png = io::encode_png(target);
    std::lock_guard lock(mutex_);
    const auto body = impl_->post(options_, "/targets", std::string(png.begin(), png.end()), "image/png");
    try {
        return nlohmann::json::parse(body).at("target_id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed /targets response: ") + e.what());
    }
}

LossReport PerceptualClient::loss(const std::string& target_id, const GrayImage& sketch, const LossConfig& config,
                                  int n_augment, std::uint64_t seed) {
    wire::Frame req;
    req.header = {{"target_id", target_id},  {"lambda", config.lambda},
                  {"clip_layer", config.clip_layer}, {"vgg_layer", config.vgg_layer},
                  {"n_augment", n_augment},  {"seed", seed},
                  {"width", sketch.width},   {"height", sketch.height},
                  {"channels", 3}};
    req.sections.push_back(wire::gray_section("sketch", sketch));
    const auto payload = wire::encode(req);

    std::string body;
    {
        std::lock_guard lock(mutex_);
        body = impl_->post(options_, "/loss", payload, wire::kContentType);
    }

    wire::Frame res;
    try {
        res = wire::decode(body);
    } catch (const DomainError& e) {
        throw TransportError(std::string("malformed /loss response: ") + e.what());
    }
    LossReport r;
    r.clip1 = scalar(res.header, "clip1");
    r.clip2 = scalar(res.header, "clip2");
    r.clip = scalar(res.header, "clip");
    r.vgg = scalar(res.header, "vgg");
    r.total = scalar(res.header, "total");
    if (!(r.clip1 >= -kLedgerTolerance && r.clip1 <= 2.0 + kLedgerTolerance)) {
        throw TransportError("clip1 outside the cosine-distance range: " + std::to_string(r.clip1));
    }
    const auto expect = combine(r.clip1, r.clip2, r.vgg, config.lambda);
    if (std::abs(expect.clip - r.clip) > kLedgerTolerance || std::abs(expect.total - r.total) > kLedgerTolerance) {
        throw TransportError("loss response violates total = clip1 + lambda*clip2 + vgg");
    }

    const auto* grad = res.find("pixel_grad");
    if (!grad) throw TransportError("loss response has no pixel_grad section");
    try {
        r.pixel_grad = wire::section_channel_sum(*grad);
    } catch (const DomainError& e) {
        throw TransportError(e.what());
    }
    if (!r.pixel_grad.same_shape(sketch)) throw TransportError("pixel_grad shape differs from the sketch");
    for (double v : r.pixel_grad.pixels) {
        if (!std::isfinite(v)) throw NumericError("perceptual service returned a non-finite gradient");
    }
    return r;
}

double PerceptualClient::lpips(const RgbImage& a, const RgbImage& b) {
    if (a.width != b.width || a.height != b.height) throw DomainError("lpips inputs differ in size");
    wire::Frame req;
    req.header = {{"width", a.width}, {"height", a.height}, {"channels", 3}};
    req.sections.push_back(wire::rgb_section("image_a", a));
    req.sections.push_back(wire::rgb_section("image_b", b));
    const auto payload = wire::encode(req);
    std::string body;
    {
        std::lock_guard lock(mutex_);
        body = impl_->post(options_, "/lpips", payload, wire::kContentType);
    }
    try {
        const double v = nlohmann::json::parse(body).at("lpips").get<double>();
        if (!std::isfinite(v) || v < 0.0) throw TransportError("lpips response out of range");
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed /lpips response: ") + e.what());
    }
}

}  // namespace strokeforge
