#include <catch_amalgamated.hpp>

#include "laughkit/integral_image.hpp"
#include "laughkit/rng.hpp"
#include "laughkit/types.hpp"

#include "oracles.hpp"

using namespace laughkit;

namespace {

GrayImage random_image(int w, int h, Rng& rng) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

} // namespace

TEST_CASE("rect sums match pixel enumeration on random in-bounds rects") {
    Rng rng(101);
    GrayImage img = random_image(64, 64, rng);
    IntegralImage ii(img);
    for (int i = 0; i < 10000; ++i) {
        const int w = static_cast<int>(rng.uniform_int(1, 64));
        const int h = static_cast<int>(rng.uniform_int(1, 64));
        const int x = static_cast<int>(rng.uniform_int(0, 64 - w));
        const int y = static_cast<int>(rng.uniform_int(0, 64 - h));
        const Rect r{x, y, w, h};
        REQUIRE(ii.rect_sum(r, false) == oracle::pixel_rect_sum(img, r));
        REQUIRE(ii.sq_rect_sum_clipped(r) == oracle::pixel_sq_rect_sum(img, r));
    }
}

TEST_CASE("clipped rect sums use zero extension outside the image") {
    Rng rng(102);
    GrayImage img = random_image(31, 17, rng);
    IntegralImage ii(img);
    for (int i = 0; i < 5000; ++i) {
        const Rect r{static_cast<int>(rng.uniform_int(-10, 40)),
                     static_cast<int>(rng.uniform_int(-10, 25)),
                     static_cast<int>(rng.uniform_int(1, 20)),
                     static_cast<int>(rng.uniform_int(1, 20))};
        REQUIRE(ii.rect_sum_clipped(r) == oracle::pixel_rect_sum(img, r));
        REQUIRE(ii.sq_rect_sum_clipped(r) == oracle::pixel_sq_rect_sum(img, r));
    }
}

TEST_CASE("tilted sums match diamond pixel enumeration") {
    Rng rng(103);
    GrayImage img = random_image(40, 40, rng);
    // wide margin: corner lookups of clipped diamonds stay inside the band
    IntegralImage ii(img, true, IntegralImage::required_rotated_margin(12.0));
    SECTION("fully interior diamonds") {
        for (int i = 0; i < 10000; ++i) {
            const int w = static_cast<int>(rng.uniform_int(1, 10));
            const int h = static_cast<int>(rng.uniform_int(1, 10));
            const int x = static_cast<int>(rng.uniform_int(h - 1, 40 - w));
            const int y = static_cast<int>(rng.uniform_int(0, 40 - (w + h - 1)));
            const Rect r{x, y, w, h};
            REQUIRE(ii.rect_sum(r, true) == oracle::pixel_tilted_sum(img, r));
        }
    }
    SECTION("diamonds clipped at every border") {
        for (int i = 0; i < 5000; ++i) {
            const Rect r{static_cast<int>(rng.uniform_int(-2, 41)),
                         static_cast<int>(rng.uniform_int(0, 38)),
                         static_cast<int>(rng.uniform_int(1, 8)),
                         static_cast<int>(rng.uniform_int(1, 8))};
            REQUIRE(ii.tilted_rect_sum_clipped(r) == oracle::pixel_tilted_sum(img, r));
        }
    }
}

TEST_CASE("single pixel diamond equals that pixel") {
    Rng rng(104);
    GrayImage img = random_image(8, 8, rng);
    IntegralImage ii(img, true);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            REQUIRE(ii.rect_sum(Rect{x, y, 1, 1}, true) == img.at(x, y));
        }
    }
}

TEST_CASE("checked rect_sum rejects out-of-bounds rects") {
    Rng rng(105);
    GrayImage img = random_image(16, 16, rng);
    IntegralImage ii(img, true);
    REQUIRE_THROWS_AS(ii.rect_sum(Rect{10, 0, 8, 4}, false), error);
    REQUIRE_THROWS_AS(ii.rect_sum(Rect{0, -1, 4, 4}, false), error);
    REQUIRE_THROWS_AS(ii.rect_sum(Rect{0, 0, 4, 4}, true), error); // x-(h-1) < 0
    REQUIRE_THROWS_AS(ii.rect_sum(Rect{8, 12, 4, 4}, true), error); // bottom overflow
    try {
        ii.rect_sum(Rect{10, 0, 8, 4}, false);
        FAIL("expected an exception");
    } catch (const error& e) {
        REQUIRE(e.code() == errc::out_of_bounds);
    }
}

TEST_CASE("rotated margin covers scaled overshoot") {
    // margin for max scale s must allow reads about s+1 past each border
    REQUIRE(IntegralImage::required_rotated_margin(1.0) >= 2);
    REQUIRE(IntegralImage::required_rotated_margin(2.5) >= 4);
    Rng rng(106);
    GrayImage img = random_image(20, 20, rng);
    IntegralImage ii(img, true, IntegralImage::required_rotated_margin(3.0));
    // reads just past the border are answered (clipped), not fatal
    REQUIRE(ii.tilted_rect_sum_clipped(Rect{21, 17, 3, 3}) ==
            oracle::pixel_tilted_sum(img, Rect{21, 17, 3, 3}));
}

TEST_CASE("constant image sums are area times the constant") {
    GrayImage img;
    img.width = 12;
    img.height = 9;
    img.pixels.assign(12 * 9, 7);
    IntegralImage ii(img, true);
    REQUIRE(ii.rect_sum(Rect{2, 1, 5, 6}, false) == 7 * 5 * 6);
    // diamond pixel count for w=3,h=2 is 3*2 + 2*1 = 8
    REQUIRE(ii.rect_sum(Rect{4, 2, 3, 2}, true) == 7 * 8);
}
