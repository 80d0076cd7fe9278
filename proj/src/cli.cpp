#include "strokeforge/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "strokeforge/edge_detect.hpp"
#include "strokeforge/error.hpp"
#include "strokeforge/image_io.hpp"
#include "strokeforge/metrics.hpp"
#include "strokeforge/perceptual_client.hpp"
#include "strokeforge/report.hpp"
#include "strokeforge/server.hpp"
#include "strokeforge/svg.hpp"

namespace strokeforge {
namespace {

namespace fs = std::filesystem;

struct SessionFlags {
    int strokes = 32;
    std::uint64_t seed = 0;
    std::string backend = "builtin";
    double canny_low = 20.0;
    double canny_high = 200.0;
    double init_radius = 0.05;
    std::string sampler = "fps";
    bool freeze_previous = false;
    bool masked_loss = false;
    std::string canvas = "224";
    std::string service_url;
    int max_iters = 800;
    double lambda = 0.1;
    int augmentations = 4;

    void add_to(CLI::App& app) {
        app.add_option("--strokes", strokes, "Total stroke budget N_s")->capture_default_str();
        app.add_option("--seed", seed, "Random seed")->capture_default_str();
        app.add_option("--backend", backend, "Loss backend: builtin or remote")->capture_default_str();
        app.add_option("--canny-low", canny_low, "Canny low threshold")->capture_default_str();
        app.add_option("--canny-high", canny_high, "Canny high threshold")->capture_default_str();
        app.add_option("--init-radius", init_radius, "Control point radius around each seed")->capture_default_str();
        app.add_option("--sampler", sampler, "Seed sampler: fps or random")->capture_default_str();
        app.add_flag("--freeze-previous", freeze_previous, "Only optimize the newest round's strokes");
        app.add_flag("--masked-loss", masked_loss, "Experimental: ignore loss gradient outside the round's region");
        app.add_option("--canvas", canvas, "Optimization canvas, N or WxH")->capture_default_str();
        app.add_option("--service-url", service_url, "Perceptual service URL (default $STROKEFORGE_SERVICE_URL)");
        app.add_option("--max-iters", max_iters, "Iteration cap per round")->capture_default_str();
        app.add_option("--lambda", lambda, "Weight of the intermediate CLIP term")->capture_default_str();
        app.add_option("--augmentations", augmentations, "Augmentations per step")->capture_default_str();
    }

    SessionConfig config() const {
        SessionConfig c;
        try {
            c.canvas = parse_canvas(canvas);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        c.total_strokes = strokes;
        c.seed = seed;
        c.loss.backend = parse_backend(backend);
        c.canny = {canny_low, canny_high};
        c.init_radius = init_radius;
        c.sampler = parse_sampler(sampler);
        c.optim.retrain_previous_rounds = !freeze_previous;
        c.optim.masked_loss = masked_loss;
        c.optim.max_iters_per_round = max_iters;
        c.loss.lambda = lambda;
        c.loss.augmentations_per_step = augmentations;
        if (c.total_strokes < 1) throw ConfigError("--strokes must be >= 1");
        if (!(c.init_radius > 0.0)) throw ConfigError("--init-radius must be > 0");
        if (!(c.canny.low < c.canny.high)) throw ConfigError("--canny-low must be below --canny-high");
        c.optim.validate();
        c.loss.validate();
        return c;
    }

    std::shared_ptr<PerceptualClient> client() const {
        auto o = ServiceOptions::from_env();
        if (!service_url.empty()) o.url = service_url;
        return std::make_shared<PerceptualClient>(o);
    }
};

int sketch_command(const SessionFlags& flags, const std::string& photo_path, const std::vector<std::string>& mask_paths,
                   const std::string& out_dir, std::ostream& out) {
    const auto config = flags.config();
    const auto photo = io::read_rgb(photo_path);
    std::vector<RegionMask> regions{RegionMask::global(config.canvas.width(), config.canvas.height())};
    regions.back().label = "global";
    for (const auto& path : mask_paths) {
        auto mask = io::read_mask(path, static_cast<int>(regions.size()), fs::path(path).stem().string());
        if (mask.width != photo.width || mask.height != photo.height) {
            throw DomainError("mask " + path + " is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                              " but the photo is " + std::to_string(photo.width) + "x" + std::to_string(photo.height));
        }
        mask = io::resize(mask, config.canvas.width(), config.canvas.height());
        mask.validate(config.canvas.width(), config.canvas.height());
        regions.push_back(std::move(mask));
    }
    const auto canvas_photo = io::resize(photo, config.canvas.width(), config.canvas.height());

    std::shared_ptr<PerceptualClient> client;
    if (config.loss.backend == LossBackendKind::kRemote) client = flags.client();
    auto loss = make_loss_backend(canvas_photo, config.loss, client);
    const auto result = run_session(canvas_photo, regions, config, *loss);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::write_file(dir / "out.svg", export_svg(result.sketch, {config.seed, config_hash(config)}));
    io::write_png(dir / "out.png", render(result.sketch, result.sketch.canvas).image);
    io::write_file(dir / "report.json", session_report(result, config).dump(2) + "\n");

    for (const auto& w : result.warnings) out << "warning: " << w << "\n";
    for (const auto& r : result.rounds) {
        out << "round " << r.round_id << " region " << r.region_id << ": " << r.budget << " strokes, "
            << r.iterations << " iterations, loss " << r.initial_loss << " -> " << r.final_loss << "\n";
    }
    out << "wrote " << (dir / "out.svg").string() << "\n";
    return kExitOk;
}

volatile std::sig_atomic_t g_stop = 0;

int serve_command(const SessionFlags& flags, const std::string& host, int port, std::ostream& out) {
    const auto defaults = flags.config();
    std::shared_ptr<PerceptualClient> client;
    if (!flags.service_url.empty() || std::getenv("STROKEFORGE_SERVICE_URL") ||
        defaults.loss.backend == LossBackendKind::kRemote) {
        client = flags.client();
    }
    SessionManager sessions(client);
    SketchServer server(sessions, defaults);
    const int bound = server.bind(host, port);
    if (bound < 0) throw DomainError("cannot bind " + host + ":" + std::to_string(port));
    out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
    std::signal(SIGINT, [](int) { g_stop = 1; });
    std::signal(SIGTERM, [](int) { g_stop = 1; });
    std::thread watcher([&] {
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
    });
    server.listen();
    g_stop = 1;
    watcher.join();
    return kExitOk;
}

std::string read_text(const std::string& path) {
    const auto bytes = io::read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

GrayImage load_sketch(const std::string& path, const Canvas& canvas) {
    if (fs::path(path).extension() == ".svg") {
        Sketch sk = parse_svg(read_text(path)).sketch;
        sk.canvas = canvas;
        return render(sk, canvas).image;
    }
    return io::resize(to_grayscale(io::read_rgb(path)), canvas.width(), canvas.height());
}

int eval_command(const SessionFlags& flags, const std::vector<std::string>& files, bool with_lpips,
                 const std::string& out_dir, std::ostream& out) {
    if (files.empty() || files.size() % 2) throw ConfigError("eval expects PHOTO SKETCH pairs");
    const auto canvas = flags.config().canvas;
    std::vector<EvalPair> pairs;
    for (std::size_t i = 0; i < files.size(); i += 2) {
        EvalPair p;
        p.image_id = fs::path(files[i]).stem().string();
        p.photo = io::resize(io::read_rgb(files[i]), canvas.width(), canvas.height());
        p.sketch = load_sketch(files[i + 1], canvas);
        if (fs::path(files[i + 1]).extension() == ".svg") {
            p.strokes = static_cast<int>(parse_svg(read_text(files[i + 1])).sketch.strokes.size());
        }
        pairs.push_back(std::move(p));
    }
    const auto report = evaluate_batch(pairs, with_lpips, with_lpips ? flags.client() : nullptr);
    fs::create_directories(out_dir);
    io::write_file(fs::path(out_dir) / "eval.csv", report.to_csv());
    io::write_file(fs::path(out_dir) / "eval.json", report.to_json() + "\n");
    out << report.to_csv();
    return kExitOk;
}

int ablate_command(const SessionFlags& flags, const std::string& photo_path, int trials, const std::string& out_dir,
                   std::ostream& out) {
    const auto config = flags.config();
    const auto photo = io::resize(to_grayscale(io::read_rgb(photo_path)), config.canvas.width(), config.canvas.height());
    const auto a = run_sampling_ablation(photo, config.total_strokes, trials, config.seed, config.canny);
    fs::create_directories(out_dir);
    io::write_file(fs::path(out_dir) / "ablation.json", a.to_json().dump(2) + "\n");
    out << "edge points " << a.edge_points << ", seeds " << a.budget << "\n"
        << "fps min distance " << a.fps_min_distance << " px\n"
        << "fps wins " << a.fps_wins << "/" << a.trials << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photo to vector sketch"};
    app.require_subcommand(1);
    SessionFlags flags;

    auto* sketch = app.add_subcommand("sketch", "Sketch a photo, optionally refined region by region");
    std::string photo, out_dir = ".";
    std::vector<std::string> masks;
    sketch->add_option("photo", photo, "Photo (PNG or JPEG)")->required();
    sketch->add_option("masks", masks, "Region masks, one round each, in order");
    sketch->add_option("--mask", masks, "Region mask (repeatable)");
    sketch->add_option("-o,--out-dir", out_dir, "Output directory")->capture_default_str();
    flags.add_to(*sketch);

    auto* serve = app.add_subcommand("serve", "Run the HTTP session server");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    flags.add_to(*serve);

    auto* eval = app.add_subcommand("eval", "SSIM (and LPIPS) of sketches against their photos");
    std::vector<std::string> files;
    bool with_lpips = false;
    eval->add_option("pairs", files, "PHOTO SKETCH [PHOTO SKETCH ...]; sketches as .svg or images")->required();
    eval->add_flag("--lpips", with_lpips, "Also query LPIPS from the perceptual service");
    eval->add_option("-o,--out-dir", out_dir, "Output directory")->capture_default_str();
    flags.add_to(*eval);

    auto* ablate = app.add_subcommand("ablate", "FPS vs random seed spacing on one photo");
    int trials = 100;
    ablate->add_option("photo", photo, "Photo (PNG or JPEG)")->required();
    ablate->add_option("--trials", trials)->capture_default_str();
    ablate->add_option("-o,--out-dir", out_dir, "Output directory")->capture_default_str();
    flags.add_to(*ablate);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (sketch->parsed()) return sketch_command(flags, photo, masks, out_dir, out);
        if (serve->parsed()) return serve_command(flags, host, port, out);
        if (eval->parsed()) return eval_command(flags, files, with_lpips, out_dir, out);
        if (ablate->parsed()) return ablate_command(flags, photo, trials, out_dir, out);
    } catch (const TransportError& e) {
        err << "error: perceptual service: " << e.what() << "\n";
        return kExitBackend;
    } catch (const NoDrawableContent& e) {
        err << "error: " << e.what() << " (try lower --canny-low/--canny-high)\n";
        return kExitInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace strokeforge
