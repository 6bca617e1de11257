#include <doctest.h>

#include <cmath>

#include "tussock/errors.hpp"
#include "tussock/texture.hpp"

using namespace tussock;

namespace {

QuantizedRaster five_by_five() {
    return {5, 5, 4, {0, 0, 1, 1, 2, 0, 0, 1, 1, 3, 0, 2, 2, 2, 1, 2, 2, 3, 3, 0, 1, 3, 0, 2, 2}};
}

}  // namespace

TEST_CASE("frozen statistics for a 5x5 four-level window") {
    const auto q = five_by_five();
    const auto g = glcm_window(q, 2, 2, 2, default_offsets());
    CHECK(g.total() == 144);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g.count(i, j) == g.count(j, i));

    const auto s = glcm_stats(g);
    REQUIRE(s);
    CHECK(s->contrast == doctest::Approx(1.7777777777777777).epsilon(1e-14));
    CHECK(s->dissimilarity == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s->homogeneity == doctest::Approx(0.5777777777777777).epsilon(1e-14));
    CHECK(s->energy == doctest::Approx(0.27568657279554454).epsilon(1e-14));
    CHECK(s->correlation == doctest::Approx(0.19777158774373257).epsilon(1e-14));
    CHECK(s->asm_ == doctest::Approx(0.07600308641975309).epsilon(1e-14));
}

TEST_CASE("single-entry co-occurrence") {
    Glcm g(4);
    g.add_pair(0, 0);
    const auto s = glcm_stats(g);
    REQUIRE(s);
    CHECK(s->contrast == 0.0);
    CHECK(s->asm_ == 1.0);
    CHECK(s->energy == 1.0);
    CHECK(s->homogeneity == 1.0);
    CHECK(s->correlation == 0.0);
    CHECK_FALSE(glcm_stats(Glcm(4)).has_value());
}

TEST_CASE("windows clip at the edge and skip nodata") {
    QuantizedRaster q{3, 1, 2, {0, 1, QuantizedRaster::kNodata}};
    const std::vector<Offset> right = {{1, 0}};
    const auto g = glcm_window(q, 0, 0, 1, right);
    CHECK(g.total() == 2);
    CHECK(g.count(0, 1) == 1);
    CHECK(g.count(1, 0) == 1);
    CHECK(glcm_window(q, 2, 0, 0, right).empty());
}

TEST_CASE("quantization") {
    GridSpec grid{5, 1, 0.0, 10.0, 10.0};
    BandRaster r(grid, std::vector<double>{0.0, 0.25, 0.5, 1.0, -9999.0}, -9999.0);
    const auto q = quantize(r, 4);
    CHECK(q.values == std::vector<int>{0, 1, 2, 3, QuantizedRaster::kNodata});
    const auto flat = quantize(BandRaster(grid, 0.3, -9999.0), 8);
    for (int v : flat.values) CHECK(v == 0);
    CHECK_THROWS_AS(quantize(r, 1), Error);
}

TEST_CASE("grey band is the per-pixel mean") {
    GridSpec grid{2, 1, 0.0, 10.0, 10.0};
    BandRaster a(grid, std::vector<double>{0.2, -9999.0}, -9999.0);
    BandRaster b(grid, std::vector<double>{0.4, 0.4}, -9999.0);
    const BandRaster* members[] = {&a, &b};
    const auto grey = grey_from(members);
    CHECK(grey.at(0, 0) == doctest::Approx(0.3));
    CHECK_FALSE(grey.valid(1, 0));
}

TEST_CASE("texture features of a constant composite") {
    GridSpec grid{6, 6, 0.0, 60.0, 10.0};
    SeasonalComposite c{CompositePeriod::survey(2021), {}};
    c.bands.emplace(BandId::B2, BandRaster(grid, 0.1, -9999.0));
    c.bands.emplace(BandId::B3, BandRaster(grid, 0.2, -9999.0));
    const PixelIndex px[] = {{0, 0}, {3, 3}};
    const auto f = texture_features(c, {BandId::B2, BandId::B3}, {}, px);
    REQUIRE(f.size() == 2);
    REQUIRE(f[0].size() == 18);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(f[1][k * 6 + 0] == 0.0);  // contrast
        CHECK(f[1][k * 6 + 3] == 1.0);  // energy
        CHECK(f[1][k * 6 + 4] == 0.0);  // correlation
    }
}
