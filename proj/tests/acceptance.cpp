// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "strokeforge/edge_detect.hpp"
#include "strokeforge/metrics.hpp"
#include "strokeforge/optimize.hpp"
#include "strokeforge/raster.hpp"
#include "strokeforge/report.hpp"
#include "strokeforge/stroke_init.hpp"
#include "strokeforge/svg.hpp"

using namespace strokeforge;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double& coord(Sketch& sk, std::size_t flat) {
    auto& p = sk.strokes[flat / 8].control_points[(flat % 8) / 2];
    return flat % 2 ? p.y : p.x;
}

double inner(const GrayImage& a, const GrayImage& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) s += a.pixels[i] * b.pixels[i];
    return s;
}

Outcome rasterizer_adjoint() {
    constexpr double kEps = 1e-3, kRel = 0.02, kFloor = 1e-4;
    std::mt19937_64 g(2718);
    std::normal_distribution<double> n(0.0, 1.0);
    int checked = 0, bad = 0, dot_failures = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto sk = fixtures::random_sketch(1000 + seed, 8, Canvas(224, 224));
        GrayImage u(224, 224);
        for (auto& v : u.pixels) v = n(g);
        const auto grad = render_backward(sk, sk.canvas, u).flat();

        // Directional derivative along a random direction.
        std::vector<double> dir(grad.size());
        for (auto& d : dir) d = n(g);
        const double h = 1e-6;
        Sketch plus = sk, minus = sk;
        for (std::size_t i = 0; i < dir.size(); ++i) {
            coord(plus, i) += h * dir[i];
            coord(minus, i) -= h * dir[i];
        }
        const double lhs =
            (inner(u, render(plus, plus.canvas).image) - inner(u, render(minus, minus.canvas).image)) / (2 * h);
        double rhs = 0.0;
        for (std::size_t i = 0; i < dir.size(); ++i) rhs += grad[i] * dir[i];
        if (std::abs(lhs - rhs) > 0.01 * std::abs(rhs)) ++dot_failures;

        for (std::size_t i = 0; i < grad.size(); ++i) {
            if (std::abs(grad[i]) <= kFloor) continue;
            Sketch p = sk, m = sk;
            coord(p, i) += kEps;
            coord(m, i) -= kEps;
            const double fd = (inner(u, render(p, p.canvas).image) - inner(u, render(m, m.canvas).image)) / (2 * kEps);
            ++checked;
            if (std::abs(fd - grad[i]) > kRel * std::abs(grad[i])) ++bad;
        }
    }
    std::ostringstream d;
    d << "dot-product failures " << dot_failures << "/20, finite differences at eps=1e-3 outside 2%: " << bad << "/"
      << checked << " (" << (checked ? 100.0 * bad / checked : 0.0) << "%)";
    return {dot_failures == 0 && bad == 0 && checked > 0, d.str()};
}

std::vector<std::size_t> brute_force_fps(const std::vector<PixelPoint>& pts, std::size_t k, std::size_t start) {
    std::vector<std::size_t> chosen{start};
    while (chosen.size() < k) {
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (auto c : chosen) nearest = std::min(nearest, std::hypot(pts[i].x - pts[c].x, pts[i].y - pts[c].y));
            if (nearest > best) {
                best = nearest;
                best_i = i;
            }
        }
        chosen.push_back(best_i);
    }
    return chosen;
}

Outcome fps_oracle() {
    std::mt19937_64 g(31337);
    std::uniform_int_distribution<std::size_t> n_dist(1, 12);
    int comparisons = 0, mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = n_dist(g);
        std::uniform_int_distribution<int> coord_dist(0, trial % 2 ? 8 : 60);
        std::vector<PixelPoint> pts(n);
        for (auto& p : pts) p = {coord_dist(g), coord_dist(g)};
        // k runs up to the number of distinct points; past that FPS would repeat.
        std::vector<std::pair<int, int>> uniq;
        for (auto p : pts) uniq.push_back({p.x, p.y});
        std::sort(uniq.begin(), uniq.end());
        const auto distinct = static_cast<std::size_t>(std::unique(uniq.begin(), uniq.end()) - uniq.begin());
        const auto start = std::uniform_int_distribution<std::size_t>(0, n - 1)(g);
        for (std::size_t k = 1; k <= distinct; ++k) {
            ++comparisons;
            if (fps_indices(pts, k, FpsStart::at(start)) != brute_force_fps(pts, k, start)) ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(comparisons) + " (instance, k) pairs, " + std::to_string(mismatches) +
                                 " mismatches"};
}

Outcome allocation() {
    std::mt19937_64 g(4242);
    std::uniform_int_distribution<int> regions(1, 10), strokes(1, 1024), counts(0, 20000);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<RegionEdgeCount> in;
        std::size_t total = 0;
        const int r = regions(g);
        for (int i = 0; i < r; ++i) {
            in.push_back({i, static_cast<std::size_t>(counts(g))});
            total += in.back().edge_count;
        }
        if (total == 0) in[0].edge_count = total = 7;
        const int ns = strokes(g);
        const auto plan = allocate_strokes(in, ns);
        int sum = 0;
        for (std::size_t i = 0; i < plan.entries.size(); ++i) {
            sum += plan.entries[i].budget;
            const double expect = static_cast<double>(in[i].edge_count) / static_cast<double>(total);
            if (std::abs(plan.entries[i].ratio - expect) > 1e-9) ++violations;
        }
        if (sum != ns) ++violations;
    }
    const auto worked = allocate_strokes({{0, 300}, {1, 100}}, 128);
    const bool example = worked.entries.size() == 2 && worked.entries[0].budget == 96 && worked.entries[1].budget == 32;
    return {violations == 0 && example, "1000 instances, " + std::to_string(violations) +
                                            " violations; {300,100} of 128 -> {" +
                                            std::to_string(worked.entries[0].budget) + "," +
                                            std::to_string(worked.entries[1].budget) + "}"};
}

Outcome canny_fixtures() {
    const int size = 64;
    const auto step = fixtures::step_image(size);
    const auto edges = detect_edges(step, RegionMask::global(size, size), {20.0, 200.0});
    int outside = 0;
    for (auto p : edges.points) outside += std::abs(p.x - size / 2) > 1;  // columns 31..33
    GrayImage flat(size, size, 0.4);
    const auto none = detect_edges(flat, RegionMask::global(size, size), {20.0, 200.0});
    return {!edges.points.empty() && outside == 0 && none.points.empty(),
            std::to_string(edges.points.size()) + " step-edge points, " + std::to_string(outside) +
                " outside the band; uniform image " + std::to_string(none.points.size()) + " points"};
}

Outcome circle_convergence() {
    const auto photo = gray_to_rgb(fixtures::circle_outline(224));
    SessionConfig cfg;
    cfg.total_strokes = 16;
    cfg.seed = 1;
    auto loss = make_loss_backend(photo, cfg.loss);
    const auto result = run_session(photo, {RegionMask::global(224, 224)}, cfg, *loss);
    const auto& r = result.rounds.at(0);
    bool ok = r.iterations <= 800 && r.final_loss <= 0.5 * r.initial_loss;
    const auto& h = r.loss_history;
    if (r.converged) ok = ok && h.size() >= 2 && std::abs(h.back().clean_loss - h[h.size() - 2].clean_loss) < 1e-5;
    const bool detector = has_converged({{0, 1.0}, {10, 1.0 + 5e-6}}, 1e-5) &&
                          !has_converged({{0, 1.0}, {10, 1.0 + 2e-5}}, 1e-5) && !has_converged({{0, 1.0}}, 1e-5);
    std::ostringstream d;
    d << "loss " << r.initial_loss << " -> " << r.final_loss << " (" << 100.0 * r.final_loss / r.initial_loss
      << "%) in " << r.iterations << " iterations, " << (r.converged ? "converged" : "hit the cap");
    return {ok && detector, d.str()};
}

Outcome multi_round_ledger() {
    const auto photo = fixtures::scene_photo(128);
    RegionMask house = RegionMask::global(128, 128);
    house.region_id = 1;
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x) house.bits[y * 128 + x] = x >= 25 && x < 71 && y >= 51 && y < 96;
    const std::vector<RegionMask> regions{RegionMask::global(128, 128), house};
    SessionConfig cfg;
    cfg.total_strokes = 48;
    cfg.seed = 17;
    cfg.optim.max_iters_per_round = 60;
    auto loss = make_loss_backend(photo, cfg.loss);
    const auto a = run_session(photo, regions, cfg, *loss);

    bool counts = a.rounds.size() == 2;
    int offset = 0;
    for (std::size_t i = 0; counts && i < 2; ++i) {
        const int budget = a.plan.entries[i].budget;
        counts = counts && a.rounds[i].budget == budget;
        for (int s = 0; s < budget; ++s) counts = counts && a.sketch.strokes.at(offset + s).round_id == int(i);
        offset += budget;
    }
    counts = counts && offset == 48 && static_cast<int>(a.sketch.strokes.size()) == 48;

    const auto b = run_session(photo, regions, cfg, *loss);
    bool identical = b.sketch.strokes == a.sketch.strokes;
    for (std::size_t i = 0; identical && i < a.rounds.size(); ++i)
        identical = a.rounds[i].loss_history == b.rounds[i].loss_history;
    identical = identical && export_svg(a.sketch, {cfg.seed, config_hash(cfg)}) ==
                                 export_svg(b.sketch, {cfg.seed, config_hash(cfg)});

    std::ostringstream d;
    d << "budgets {" << a.plan.entries[0].budget << "," << a.plan.entries[1].budget << "}, round stroke counts "
      << (counts ? "match" : "DIFFER") << ", rerun " << (identical ? "bit-identical" : "DIFFERS");
    return {counts && identical, d.str()};
}

Outcome ssim_properties() {
    const auto img = fixtures::random_image(1, 64, 64);
    const double self = ssim(img, img);
    const SsimConstants c;
    const double c1 = (c.k1 * c.dynamic_range) * (c.k1 * c.dynamic_range);
    const double zero_one = ssim(GrayImage(64, 64, 0.0), GrayImage(64, 64, 1.0));
    double worst_asym = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto a = fixtures::random_image(10 + 2 * i, 40, 40), b = fixtures::random_image(11 + 2 * i, 40, 40);
        worst_asym = std::max(worst_asym, std::abs(ssim(a, b) - ssim(b, a)));
    }
    std::ostringstream d;
    d << "self " << self << ", 0 vs 1 " << zero_one << " (expect " << c1 / (1 + c1) << "), max asymmetry "
      << worst_asym;
    return {std::abs(self - 1.0) <= 1e-12 && std::abs(zero_one - c1 / (1 + c1)) <= 1e-6 && worst_asym <= 1e-12, d.str()};
}

Outcome svg_round_trip() {
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Canvas canvas = seed % 2 ? Canvas(224, 224) : Canvas(320, 200);
        auto pool = fixtures::random_sketch(seed, 128, canvas, 0.3).strokes;
        Sketch sk;
        sk.canvas = canvas;
        std::vector<Stroke> r0(pool.begin(), pool.begin() + 96), r1(pool.begin() + 96, pool.end());
        for (auto& s : r1) s.round_id = 1;
        sk.append_round(r0);
        sk.append_round(r1);
        const SvgMetadata meta{seed, "00000000deadbeef"};
        const auto doc = export_svg(sk, meta);
        const auto back = parse_svg(doc);
        if (back.sketch.strokes.size() != 128 || export_svg(back.sketch, back.meta) != doc) {
            ++failures;
            continue;
        }
        for (std::size_t i = 0; i < 128; ++i)
            for (int k = 0; k < 4; ++k) {
                const auto e = back.sketch.strokes[i].control_points[k] - sk.strokes[i].control_points[k];
                worst = std::max({worst, std::abs(e.x), std::abs(e.y)});
            }
    }
    std::ostringstream d;
    d << "20 sketches of 128 strokes, " << failures << " not byte-identical, worst control point error " << worst;
    return {failures == 0 && worst <= 1e-6, d.str()};
}

Outcome sampling_ablation() {
    const auto photo = to_grayscale(fixtures::scene_photo(224));
    const auto a = run_sampling_ablation(photo, 32, 100, 9, {});
    std::ostringstream d;
    d << "fps min distance " << a.fps_min_distance << " px beats random in " << a.fps_wins << "/" << a.trials
      << " trials (" << a.edge_points << " edge points)";
    return {a.trials == 100 && a.fps_wins >= 99, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"rasterizer adjoint (dot product, finite differences eps=1e-3)", rasterizer_adjoint},
        {"fps equals brute-force greedy maximin", fps_oracle},
        {"stroke allocation exactness", allocation},
        {"canny step and uniform fixtures", canny_fixtures},
        {"builtin-loss circle convergence", circle_convergence},
        {"multi-round ledger and reproducibility", multi_round_ledger},
        {"ssim properties", ssim_properties},
        {"svg round trip", svg_round_trip},
        {"fps vs random sampling ablation", sampling_ablation},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("%s  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
