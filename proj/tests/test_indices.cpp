#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "tussock/errors.hpp"
#include "tussock/expression.hpp"
#include "tussock/indices.hpp"
#include "tussock/synth.hpp"

using namespace tussock;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::array<double, kInputBandCount> pixel(std::initializer_list<std::pair<BandId, double>> values) {
    std::array<double, kInputBandCount> out;
    out.fill(kNaN);
    for (auto [b, v] : values) out[band_slot(b)] = v;
    return out;
}

}  // namespace

TEST_CASE("expression basics") {
    const auto px = pixel({{BandId::B4, 0.2}, {BandId::B8, 0.6}});
    CHECK(Expression::compile("1 + 2 * 3").evaluate(px) == 7.0);
    CHECK(Expression::compile("(1 + 2) * 3").evaluate(px) == 9.0);
    CHECK(Expression::compile("2 ^ 3 ^ 2").evaluate(px) == 512.0);
    CHECK(Expression::compile("-B4").evaluate(px) == doctest::Approx(-0.2));
    CHECK(Expression::compile("abs(B4 - B8)").evaluate(px) == doctest::Approx(0.4));
    CHECK(Expression::compile("k * B8", {{"k", 2.0}}).evaluate(px) == doctest::Approx(1.2));
    CHECK(std::isnan(Expression::compile("B8 / (B4 - B4)").evaluate(px)));
    CHECK(std::isnan(Expression::compile("sqrt(B4 - B8)").evaluate(px)));
    CHECK(std::isnan(Expression::compile("B2 + B8").evaluate(px)));

    const auto e = Expression::compile("(B8 - B4) / (B8 + B4 + B8)");
    REQUIRE(e.bands().size() == 2);
    CHECK(e.bands()[0] == BandId::B8);
    CHECK(e.bands()[1] == BandId::B4);
}

TEST_CASE("expression syntax errors") {
    CHECK_THROWS_AS(Expression::compile("B4 +"), Error);
    CHECK_THROWS_AS(Expression::compile("(B4"), Error);
    CHECK_THROWS_AS(Expression::compile("B99"), Error);
    CHECK_THROWS_AS(Expression::compile("log(B4)"), Error);
    CHECK_THROWS_AS(Expression::compile("GREY * 2"), Error);
}

TEST_CASE("compiled and interpreted formulas agree") {
    const auto px = pixel({{BandId::B2, 0.05}, {BandId::B3, 0.3}, {BandId::B4, 0.2}, {BandId::B8, 0.6}});
    for (const char* f : {"-2^2", "-B4^2 + B8", "2^-1", "B8 / -B4", "1 - -B3", "sqrt(abs(B2 - B8)) ^ 3"}) {
        INFO(f);
        CHECK(Expression::compile(f).evaluate(px) == doctest::Approx(interpret_formula(f, {}, px)).epsilon(1e-15));
    }
}

TEST_CASE("worked index values") {
    const auto& reg = IndexRegistry::builtin();
    const auto px = pixel({{BandId::B4, 0.1}, {BandId::B8, 0.5}});
    CHECK(evaluate_index(reg.find("ID1"), px) == doctest::Approx(0.666667).epsilon(1e-6));
    CHECK(evaluate_index(reg.find("ID4"), px) == doctest::Approx(0.545455).epsilon(1e-6));
    CHECK_THROWS_AS(evaluate_index(reg.find("ID6"), px), Error);
    CHECK_THROWS_AS(reg.find("ID10"), Error);
}

TEST_CASE("registry contents") {
    const auto& reg = IndexRegistry::builtin();
    CHECK(reg.vegetation().size() == 9);
    CHECK(reg.rgb_suite().size() == 14);
    for (const auto& d : reg.rgb_suite())
        for (BandId b : d.required_bands)
            CHECK((b == BandId::B2 || b == BandId::B3 || b == BandId::B4));
    CHECK(reg.find("ID6").kind == IndexDefinition::Kind::NeighborhoodStddev);
    CHECK(reg.find("ID6").source_id == "ID1");
    CHECK(reg.table().find("NDVI") != std::string::npos);
}

TEST_CASE("registry validation") {
    CHECK_THROWS_AS(IndexRegistry::from_json(R"({"vegetation":[{"id":"A","name":"a","formula":"B4"},
        {"id":"A","name":"b","formula":"B8"}],"rgb_suite":[]})"), Error);
    CHECK_THROWS_AS(IndexRegistry::from_json(R"({"vegetation":[{"id":"S","name":"s",
        "kind":"neighborhood_stddev","source":"X"}],"rgb_suite":[]})"), Error);
    CHECK_THROWS_AS(IndexRegistry::from_json("{"), Error);
}

TEST_CASE("neighbourhood standard deviation") {
    GridSpec g{3, 3, 0.0, 30.0, 10.0};
    BandRaster spike(g, std::vector<double>{0, 0, 0, 0, 1, 0, 0, 0, 0}, -9999.0);
    const auto sd = ndvi_stddev(spike, 1);
    CHECK(sd.at(1, 1) == doctest::Approx(std::sqrt(8.0 / 81.0)).epsilon(1e-15));
    // Corner window is clipped to 2x2: {0, 0, 0, 1}.
    CHECK(sd.at(0, 0) == doctest::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-15));

    BandRaster constant(g, 0.4, -9999.0);
    const auto flat = ndvi_stddev(constant, 1);
    for (double v : flat.values()) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(ndvi_stddev(constant, 0), Error);
}

TEST_CASE("index rasters carry nodata through") {
    GridSpec g{2, 1, 0.0, 10.0, 10.0};
    SeasonalComposite c{CompositePeriod::survey(2021), {}};
    c.bands.emplace(BandId::B4, BandRaster(g, std::vector<double>{0.1, -9999.0}, -9999.0));
    c.bands.emplace(BandId::B8, BandRaster(g, std::vector<double>{0.5, 0.5}, -9999.0));
    const auto ndvi = compute_index(IndexRegistry::builtin().find("ID1"), c);
    CHECK(ndvi.at(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(ndvi.valid(1, 0));
    CHECK_THROWS_AS(compute_index(IndexRegistry::builtin().find("ID3"), c), Error);
    CHECK_THROWS_AS(rgb_index_suite(c), Error);
}
