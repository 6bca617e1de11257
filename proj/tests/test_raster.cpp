#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tussock/errors.hpp"
#include "tussock/raster.hpp"
#include "tussock/scene_io.hpp"

using namespace tussock;

namespace {

GridSpec grid(int w, int h, double px = 10.0) { return {w, h, 1000.0, 2000.0, px}; }

}  // namespace

TEST_CASE("cover classes at the boundaries") {
    CHECK(classify_cover(0) == CoverClass::None);
    CHECK(classify_cover(1) == CoverClass::Low);
    CHECK(classify_cover(10) == CoverClass::Low);
    CHECK(classify_cover(11) == CoverClass::Medium);
    CHECK(classify_cover(30) == CoverClass::Medium);
    CHECK(classify_cover(31) == CoverClass::High);
    CHECK(classify_cover(100) == CoverClass::High);
    CHECK_THROWS_AS(classify_cover(-1), Error);
    CHECK_THROWS_AS(classify_cover(101), Error);
}

TEST_CASE("band names") {
    CHECK(band_name(BandId::B8A) == "B8A");
    CHECK(parse_band("B11") == BandId::B11);
    CHECK(parse_band("B08") == BandId::B8);
    CHECK_FALSE(parse_band("B1").has_value());
    CHECK(native_resolution(BandId::B4) == 10);
    CHECK(native_resolution(BandId::B11) == 20);
}

TEST_CASE("nearest pixel lookup") {
    const auto g = grid(4, 3);
    CHECK(nearest_pixel(g, 1005.0, 1995.0) == PixelIndex{0, 0});
    CHECK(nearest_pixel(g, 1035.0, 1975.0) == PixelIndex{3, 2});
    // A shared edge goes to the lower index.
    CHECK(nearest_pixel(g, 1010.0, 1990.0) == PixelIndex{0, 0});
    CHECK(nearest_pixel(g, 1040.0, 1970.0) == PixelIndex{3, 2});
    CHECK_THROWS_AS(nearest_pixel(g, 999.0, 1995.0), Error);
}

TEST_CASE("nearest-neighbour resampling from 20 m to 10 m") {
    BandRaster coarse(grid(2, 2, 20.0), std::vector<double>{1, 2, 3, 4}, -9999.0);
    const auto fine = resample_nn(coarse, 10.0);
    REQUIRE(fine.width() == 4);
    REQUIRE(fine.height() == 4);
    CHECK(fine.at(0, 0) == 1);
    CHECK(fine.at(1, 1) == 1);
    CHECK(fine.at(2, 0) == 2);
    CHECK(fine.at(3, 3) == 4);
    CHECK(fine.at(0, 3) == 3);
}

TEST_CASE("sample_at reports nodata") {
    BandRaster r(grid(2, 1), std::vector<double>{0.5, -9999.0}, -9999.0);
    CHECK(sample_at(r, 1005.0, 1995.0) == 0.5);
    CHECK_FALSE(sample_at(r, 1015.0, 1995.0).has_value());
}

TEST_CASE("raster construction checks dimensions") {
    CHECK_THROWS_AS(BandRaster(grid(2, 2), std::vector<double>{1, 2, 3}, 0.0), Error);
    CHECK_THROWS_AS(BandRaster(grid(0, 2), 0.0, 0.0), Error);
}

TEST_CASE("scene round trip is bit exact") {
    SceneStack s(grid(3, 2), -9999.0);
    s.add_observation(BandId::B4, "2021-09-14", BandRaster(grid(3, 2), std::vector<double>{0.125, 0.25, -9999.0, 1.5, 0.0, 0.75}, -9999.0));
    s.add_observation(BandId::B8, "2021-09-14", BandRaster(grid(3, 2), 0.5, -9999.0));
    s.add_mask("2021-09-14", {1, 1, 0, 1, 0, 1});
    const auto bytes = encode_scene(s);
    const auto back = decode_scene(bytes);
    CHECK(back == s);
    CHECK(encode_scene(back) == bytes);
    CHECK_THROWS_AS(decode_scene(bytes.substr(0, bytes.size() - 1)), Error);
    CHECK_THROWS_AS(decode_scene("not a scene"), Error);
}

TEST_CASE("scene rejects duplicates and grey observations") {
    SceneStack s(grid(2, 2), -9999.0);
    s.add_observation(BandId::B2, "2021-01-01", BandRaster(grid(2, 2), 0.1, -9999.0));
    CHECK_THROWS_AS(s.add_observation(BandId::B2, "2021-01-01", BandRaster(grid(2, 2), 0.1, -9999.0)), Error);
    CHECK_THROWS_AS(s.add_observation(BandId::Grey, "2021-01-01", BandRaster(grid(2, 2), 0.1, -9999.0)), Error);
    CHECK_THROWS_AS(s.add_observation(BandId::B3, "2021-01-01", BandRaster(grid(3, 2), 0.1, -9999.0)), Error);
}

TEST_CASE("plot csv parsing") {
    std::istringstream in(
        "plot_id,x,y,cover_percent,survey_year\n"
        "P1,1005,1995,0,2021\n"
        "P2,1015,1985,25,2022\n");
    const auto plots = parse_plots(in);
    REQUIRE(plots.size() == 2);
    CHECK(plots[1].cover_class == CoverClass::Medium);
    CHECK(plots[1].survey_year == 2022);

    std::istringstream by_class("plot_id,x,y,cover_class,survey_year\nP1,1,2,High,2021\n");
    CHECK(parse_plots(by_class)[0].cover_class == CoverClass::High);

    std::istringstream bad("plot_id,x,y,cover_percent,survey_year\nP1,1,2,140,2021\n");
    CHECK_THROWS_AS(parse_plots(bad), Error);
}
