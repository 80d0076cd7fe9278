#include <doctest.h>

#include <cmath>

#include "fake_service.hpp"
#include "fixtures.hpp"
#include "strokeforge/edge_detect.hpp"
#include "strokeforge/error.hpp"
#include "strokeforge/metrics.hpp"
#include "strokeforge/perceptual_client.hpp"

using namespace strokeforge;

TEST_CASE("ssim closed forms") {
    const auto a = fixtures::random_image(1, 40, 32);
    CHECK(ssim(a, a) == 1.0);
    const double c1 = 0.01 * 0.01;
    CHECK(std::abs(ssim(GrayImage(32, 32, 0.0), GrayImage(32, 32, 1.0)) - c1 / (1 + c1)) <= 1e-6);
    CHECK(ssim(GrayImage(16, 16, 0.3), GrayImage(16, 16, 0.3)) == 1.0);
    CHECK_THROWS_AS(ssim(a, GrayImage(32, 40)), DomainError);
    CHECK_THROWS_AS(ssim(GrayImage(8, 8), GrayImage(8, 8)), DomainError);
}

TEST_CASE("ssim symmetry and range") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto a = fixtures::random_image(2 * s, 24, 20);
        const auto b = fixtures::random_image(2 * s + 1, 24, 20);
        const double ab = ssim(a, b), ba = ssim(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab >= -1.0);
        CHECK(ab < 1.0);
    }
    // An image is closer to itself than to noise.
    const auto photo = to_grayscale(fixtures::scene_photo(64));
    CHECK(ssim(photo, photo) > ssim(photo, fixtures::random_image(3, 64, 64)));
}

TEST_CASE("evaluate_batch") {
    CHECK_THROWS_AS(evaluate_batch({}, false), DomainError);

    const auto photo = gray_to_rgb(fixtures::random_image(4, 32, 32));
    const auto same = evaluate_batch({{"a", 8, photo, to_grayscale(photo)}}, false);
    REQUIRE(same.items.size() == 1);
    CHECK(*same.mean_ssim == 1.0);
    CHECK(!same.mean_lpips);

    std::vector<EvalPair> pairs;
    for (int i = 0; i < 6; ++i) {
        pairs.push_back({"img" + std::to_string(i), 32, fixtures::scene_photo(48),
                         fixtures::random_image(10 + i, 48, 48)});
    }
    pairs.push_back({"broken", 32, fixtures::scene_photo(48), GrayImage(20, 20, 1.0)});
    const auto r = evaluate_batch(pairs, false);
    REQUIRE(r.items.size() == 7);
    CHECK(!r.items[6].ssim);
    CHECK(!r.items[6].error.empty());
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
        CHECK(r.items[i].ssim == doctest::Approx(ssim(to_grayscale(pairs[i].photo), pairs[i].sketch)));
        sum += *r.items[i].ssim;
    }
    CHECK(*r.mean_ssim == doctest::Approx(sum / 6).epsilon(1e-12));

    const auto csv = r.to_csv();
    CHECK(csv.rfind("image_id,strokes,ssim,lpips\n", 0) == 0);
    CHECK(csv.find("broken,32,NA,NA") != std::string::npos);
    const auto json = nlohmann::json::parse(r.to_json());
    CHECK(json["items"].size() == 7);
    CHECK(json["items"][6]["ssim"].is_null());
    CHECK(json["mean_ssim"].get<double>() == doctest::Approx(*r.mean_ssim));
}

TEST_CASE("lpips through the batch") {
    fixtures::FakeService service;
    auto client = std::make_shared<PerceptualClient>(service.options());
    const auto photo = gray_to_rgb(fixtures::random_image(5, 32, 32));
    const auto r = evaluate_batch({{"x", 4, photo, to_grayscale(photo)}}, true, client);
    REQUIRE(r.mean_lpips);
    CHECK(*r.mean_lpips <= 1e-6);
    CHECK(*r.mean_ssim == 1.0);
    CHECK(lpips(*client, photo, photo) <= 1e-6);

    ServiceOptions dead;
    dead.url = "http://127.0.0.1:1";
    dead.connect_timeout = std::chrono::milliseconds(200);
    dead.retry_backoff = std::chrono::milliseconds(1);
    const auto offline = evaluate_batch({{"x", 4, photo, to_grayscale(photo)}}, true,
                                        std::make_shared<PerceptualClient>(dead));
    CHECK(!offline.items[0].lpips);
    CHECK(!offline.mean_lpips);
    CHECK(offline.items[0].error.find("lpips unavailable") != std::string::npos);
    CHECK(offline.to_csv().find("x,4,1.000000,NA") != std::string::npos);
}
