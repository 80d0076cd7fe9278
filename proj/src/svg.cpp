#include "strokeforge/svg.hpp"

#include <cinttypes>
#include <cstdio>
#include <regex>

#include <json.hpp>

#include "strokeforge/error.hpp"

namespace strokeforge {
namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    // Avoid "-0.000000" so equal documents stay byte-identical.
    if (std::string(buf) == "-0.000000") return "0.000000";
    return buf;
}

}  // namespace

std::string config_json(const SessionConfig& c) {
    nlohmann::json j{
        {"canvas", {c.canvas.width(), c.canvas.height()}},
        {"total_strokes", c.total_strokes},
        {"seed", c.seed},
        {"init_radius", c.init_radius},
        {"stroke_width", c.stroke_width},
        {"sampler", to_string(c.sampler)},
        {"canny", {{"low", c.canny.low}, {"high", c.canny.high}, {"l2_gradient", c.canny.l2_gradient}}},
        {"optim",
         {{"learning_rate", c.optim.learning_rate},
          {"max_iters_per_round", c.optim.max_iters_per_round},
          {"eval_interval", c.optim.eval_interval},
          {"convergence_eps", c.optim.convergence_eps},
          {"adam_beta1", c.optim.adam_beta1},
          {"adam_beta2", c.optim.adam_beta2},
          {"adam_eps", c.optim.adam_eps},
          {"retrain_previous_rounds", c.optim.retrain_previous_rounds},
          {"masked_loss", c.optim.masked_loss}}},
        {"loss",
         {{"backend", to_string(c.loss.backend)},
          {"lambda", c.loss.lambda},
          {"clip_layer", c.loss.clip_layer},
          {"vgg_layer", c.loss.vgg_layer},
          {"augmentations_per_step", c.loss.augmentations_per_step},
          {"pyramid_levels", c.loss.pyramid_levels}}},
    };
    return j.dump();
}

std::string config_hash(const SessionConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : config_json(config)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string export_svg(const Sketch& sketch, const SvgMetadata& meta) {
    const int w = sketch.canvas.width(), h = sketch.canvas.height();
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
    nlohmann::json m{{"seed", meta.seed},
                     {"config_hash", meta.config_hash},
                     {"canvas", {w, h}},
                     {"rounds", sketch.rounds_completed},
                     {"strokes", sketch.strokes.size()}};
    out += "<metadata>" + m.dump() + "</metadata>\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    std::size_t i = 0;
    for (int r = 0; r < sketch.rounds_completed || i < sketch.strokes.size(); ++r) {
        if (i < sketch.strokes.size() && sketch.strokes[i].round_id < r) throw DomainError("sketch rounds out of order");
        out += "<g id=\"round-" + std::to_string(r) + "\">\n";
        for (; i < sketch.strokes.size() && sketch.strokes[i].round_id == r; ++i) {
            const auto& s = sketch.strokes[i];
            const auto p = [&](int k) {
                const auto q = sketch.canvas.to_pixels(s.control_points[k]);
                return num(q.x) + " " + num(q.y);
            };
            out += "<path d=\"M " + p(0) + " C " + p(1) + " " + p(2) + " " + p(3) + "\" stroke=\"#000000\" fill=\"none\" "
                   "stroke-width=\"" + num(s.width * sketch.canvas.min_side()) + "\" stroke-linecap=\"round\"/>\n";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

ParsedSvg parse_svg(const std::string& doc) {
    static const std::regex svg_re(R"re(<svg[^>]*\swidth="(\d+)"\s+height="(\d+)")re");
    static const std::regex meta_re(R"re(<metadata>(.*?)</metadata>)re");
    static const std::regex token_re(
        R"re(<g id="round-(\d+)">|<path d="M (\S+) (\S+) C (\S+) (\S+) (\S+) (\S+) (\S+) (\S+)"[^>]*stroke-width="([^"]+)")re");

    std::smatch sm;
    if (!std::regex_search(doc, sm, svg_re)) throw DomainError("not a sketch SVG: missing <svg width/height>");
    ParsedSvg out;
    out.sketch.canvas = Canvas(std::stoi(sm[1]), std::stoi(sm[2]));
    const auto& canvas = out.sketch.canvas;

    int rounds = -1;
    if (std::regex_search(doc, sm, meta_re)) {
        try {
            const auto m = nlohmann::json::parse(sm[1].str());
            out.meta.seed = m.value("seed", std::uint64_t{0});
            out.meta.config_hash = m.value("config_hash", "");
            rounds = m.value("rounds", -1);
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(std::string("bad SVG metadata: ") + e.what());
        }
    }

    int current = -1, groups = 0;
    for (auto it = std::sregex_iterator(doc.begin(), doc.end(), token_re); it != std::sregex_iterator(); ++it) {
        const auto& t = *it;
        if (t[1].matched) {
            current = std::stoi(t[1]);
            ++groups;
            continue;
        }
        if (current < 0) throw DomainError("path outside a round group");
        Stroke s;
        s.round_id = current;
        try {
            for (int k = 0; k < 4; ++k) {
                s.control_points[k] = canvas.to_normalized({std::stod(t[2 + 2 * k]), std::stod(t[3 + 2 * k])});
            }
            s.width = std::stod(t[10]) / canvas.min_side();
        } catch (const std::exception&) {
            throw DomainError("malformed path coordinates");
        }
        out.sketch.strokes.push_back(s);
    }
    out.sketch.rounds_completed = rounds >= 0 ? rounds : groups;
    if (!out.sketch.well_ordered()) throw DomainError("SVG round groups out of order");
    return out;
}

}  // namespace strokeforge
