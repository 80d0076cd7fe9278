#include "strokeforge/server.hpp"

#include <charconv>

#include <httplib.h>
#include <json.hpp>

#include "strokeforge/error.hpp"
#include "strokeforge/image_io.hpp"

namespace strokeforge {
namespace {

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("parameter '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v.empty()) return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("parameter '" + key + "' expects true/false, got '" + v + "'");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", message}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                    "application/json");
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const SessionNotFound& e) {
        send_error(res, 404, e.what());
    } catch (const SessionBusy& e) {
        send_error(res, 409, e.what());
    } catch (const ConfigError& e) {
        send_error(res, 400, e.what());
    } catch (const DomainError& e) {
        send_error(res, 422, e.what());
    } catch (const TransportError& e) {
        send_error(res, 502, e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 422, std::string("invalid JSON body: ") + e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, e.what());
    }
}

std::vector<std::uint8_t> bytes_of(const std::string& body) { return {body.begin(), body.end()}; }

// Query-string parameters only; httplib also folds form-encoded bodies into
// req.params, which for an upload without a Content-Type is the image itself.
httplib::Params query_params(const httplib::Request& req) {
    httplib::Params params;
    const auto q = req.target.find('?');
    if (q != std::string::npos) httplib::detail::parse_query_text(req.target.substr(q + 1), params);
    return params;
}

std::string query_value(const httplib::Request& req, const std::string& key) {
    const auto params = query_params(req);
    const auto it = params.find(key);
    return it == params.end() ? std::string() : it->second;
}

}  // namespace

Canvas parse_canvas(const std::string& spec) {
    const auto x = spec.find('x');
    if (x == std::string::npos) {
        const auto side = static_cast<int>(to_int("canvas", spec));
        return Canvas(side, side);
    }
    return Canvas(static_cast<int>(to_int("canvas", spec.substr(0, x))),
                  static_cast<int>(to_int("canvas", spec.substr(x + 1))));
}

SessionConfig config_from_params(const std::multimap<std::string, std::string>& params, SessionConfig c) {
    for (const auto& [key, value] : params) {
        if (key == "strokes") c.total_strokes = static_cast<int>(to_int(key, value));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, value));
        else if (key == "backend") c.loss.backend = parse_backend(value);
        else if (key == "canny_low") c.canny.low = to_double(key, value);
        else if (key == "canny_high") c.canny.high = to_double(key, value);
        else if (key == "init_radius") c.init_radius = to_double(key, value);
        else if (key == "sampler") c.sampler = parse_sampler(value);
        else if (key == "freeze_previous") c.optim.retrain_previous_rounds = !to_bool(key, value);
        else if (key == "canvas") {
            try {
                c.canvas = parse_canvas(value);
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
        else if (key == "lambda") c.loss.lambda = to_double(key, value);
        else if (key == "augmentations") c.loss.augmentations_per_step = static_cast<int>(to_int(key, value));
        else if (key == "max_iters") c.optim.max_iters_per_round = static_cast<int>(to_int(key, value));
        else if (key == "eval_interval") c.optim.eval_interval = static_cast<int>(to_int(key, value));
        else throw ConfigError("unknown parameter '" + key + "'");
    }
    if (c.total_strokes < 1) throw ConfigError("strokes must be >= 1");
    if (!(c.init_radius > 0.0)) throw ConfigError("init_radius must be > 0");
    if (!(c.canny.low < c.canny.high)) throw ConfigError("canny_low must be below canny_high");
    c.optim.validate();
    c.loss.validate();
    return c;
}

struct SketchServer::Impl {
    SessionManager& sessions;
    SessionConfig defaults;
    httplib::Server http;

    Impl(SessionManager& s, SessionConfig d) : sessions(s), defaults(std::move(d)) { routes(); }

    void routes() {
        http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto config = config_from_params(query_params(req), defaults);
                const auto photo = io::decode_rgb(bytes_of(req.body));
                const auto id = sessions.create(photo, config);
                send_json(res, 201, {{"session_id", id}, {"canvas", {config.canvas.width(), config.canvas.height()}}});
            });
        });
        http.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto r = sessions.report(req.matches[1]);
                send_json(res, 200, {{"session_id", r["session_id"]}, {"status", r["status"]},
                                     {"rounds", r["rounds"].size()}, {"strokes", r["strokes"]}});
            });
        });
        http.Post(R"(/sessions/([^/]+)/regions)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                int region = 0;
                if (req.get_header_value("Content-Type").rfind("application/json", 0) == 0) {
                    const auto body = nlohmann::json::parse(req.body);
                    std::vector<Vec2> vertices;
                    for (const auto& v : body.at("polygon")) vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
                    region = sessions.add_polygon(id, vertices, body.value("label", ""));
                } else {
                    region = sessions.add_mask(id, io::decode_mask(bytes_of(req.body), 0, query_value(req, "label")));
                }
                send_json(res, 201, {{"region_id", region}});
            });
        });
        http.Post(R"(/sessions/([^/]+)/rounds)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                std::optional<int> region;
                RoundOverrides o;
                if (!req.body.empty()) {
                    const auto body = nlohmann::json::parse(req.body);
                    if (body.contains("region_id")) region = body["region_id"].get<int>();
                    if (body.contains("max_iters")) o.max_iters = body["max_iters"].get<int>();
                    if (body.contains("eval_interval")) o.eval_interval = body["eval_interval"].get<int>();
                    if (body.contains("freeze_previous")) o.freeze_previous = body["freeze_previous"].get<bool>();
                    if (body.contains("masked_loss")) o.masked_loss = body["masked_loss"].get<bool>();
                }
                const auto t = sessions.start_round(req.matches[1], region, o);
                send_json(res, 202, {{"round_id", t.round_id}, {"region_id", t.region_id}, {"budget", t.budget}});
            });
        });
        http.Get(R"(/sessions/([^/]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                const auto& log = sessions.progress(id);
                std::size_t from = 0;
                if (req.has_param("from")) from = static_cast<std::size_t>(to_int("from", req.get_param_value("from")));
                auto cursor = std::make_shared<std::size_t>(from);
                res.set_chunked_content_provider("application/x-ndjson", [this, id, &log, cursor](std::size_t,
                                                                                                  httplib::DataSink& sink) {
                    const bool was_running = sessions.running(id);
                    for (const auto& line : log.read(*cursor, std::chrono::milliseconds(200))) {
                        if (!sink.write(line.data(), line.size())) return false;
                    }
                    if (!was_running && *cursor >= log.size()) sink.done();
                    return true;
                });
            });
        });
        http.Get(R"(/sessions/([^/]+)/sketch\.svg)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { res.set_content(sessions.sketch_svg(req.matches[1]), "image/svg+xml"); });
        });
        http.Get(R"(/sessions/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, sessions.report(req.matches[1])); });
        });
    }
};

SketchServer::SketchServer(SessionManager& sessions, SessionConfig defaults)
    : impl_(std::make_unique<Impl>(sessions, std::move(defaults))) {}

SketchServer::~SketchServer() { stop(); }

int SketchServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool SketchServer::listen() { return impl_->http.listen_after_bind(); }

void SketchServer::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
}

void SketchServer::wait_until_ready() { impl_->http.wait_until_ready(); }

}  // namespace strokeforge
