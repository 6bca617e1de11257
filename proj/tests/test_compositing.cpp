#include <doctest.h>

#include "tussock/compositing.hpp"
#include "tussock/errors.hpp"

using namespace tussock;

namespace {

const GridSpec kGrid{2, 1, 0.0, 20.0, 10.0};

BandRaster pair(double a, double b) { return BandRaster(kGrid, std::vector<double>{a, b}, -9999.0); }

}  // namespace

TEST_CASE("iso dates") {
    CHECK(parse_iso_date("2021-02-29") == std::nullopt);
    CHECK(parse_iso_date("2020-02-29").has_value());
    CHECK(parse_iso_date("2021-13-01") == std::nullopt);
    CHECK(parse_iso_date("2021-1-01") == std::nullopt);
    CHECK(format_iso_date({2021, 9, 4}) == "2021-09-04");
}

TEST_CASE("seasons and their year labels") {
    CHECK(season_of({2021, 3, 1}) == Season::Autumn);
    CHECK(season_of({2021, 8, 31}) == Season::Winter);
    CHECK(season_of({2021, 11, 30}) == Season::Spring);
    CHECK(season_of({2021, 12, 1}) == Season::Summer);
    CHECK(season_of({2022, 2, 28}) == Season::Summer);
    CHECK(season_year({2021, 12, 15}) == 2022);
    CHECK(season_year({2022, 1, 15}) == 2022);
    CHECK(season_year({2021, 11, 15}) == 2021);
}

TEST_CASE("period membership") {
    const auto summer = CompositePeriod::of_season(Season::Summer, 2022);
    CHECK(summer.contains({2021, 12, 1}));
    CHECK(summer.contains({2022, 2, 28}));
    CHECK_FALSE(summer.contains({2022, 12, 1}));

    const auto survey = CompositePeriod::survey(2021);
    CHECK(survey.contains({2021, 9, 1}));
    CHECK(survey.contains({2021, 12, 31}));
    CHECK_FALSE(survey.contains({2022, 1, 1}));
    CHECK_FALSE(survey.contains({2021, 8, 31}));

    CHECK(survey.token() == "SURVEY:2021");
    CHECK(CompositePeriod::parse("WINTER:2022") == CompositePeriod::of_season(Season::Winter, 2022));
    CHECK_FALSE(CompositePeriod::parse("WINTER-2022").has_value());
    CHECK_FALSE(CompositePeriod::parse("FALL:2022").has_value());
}

TEST_CASE("survey-year cycle pairs summer with the following year") {
    CHECK(cycle_period(Season::Autumn, 2021) == CompositePeriod::of_season(Season::Autumn, 2021));
    CHECK(cycle_period(Season::Summer, 2021) == CompositePeriod::of_season(Season::Summer, 2022));
}

TEST_CASE("median over odd and even counts with masks and nodata") {
    SceneStack s(kGrid, -9999.0);
    s.add_observation(BandId::B4, "2021-09-05", pair(0.1, 0.4));
    s.add_observation(BandId::B4, "2021-10-05", pair(0.3, -9999.0));
    s.add_observation(BandId::B4, "2021-11-05", pair(0.2, 0.8));
    s.add_observation(BandId::B4, "2021-07-05", pair(5.0, 5.0));
    s.add_mask("2021-11-05", {1, 0});

    const auto spring = seasonal_median(s, BandId::B4, Season::Spring, 2021);
    CHECK(spring.at(0, 0) == doctest::Approx(0.2));
    // Pixel 1: 0.4 only (nodata and masked observations skipped).
    CHECK(spring.at(1, 0) == doctest::Approx(0.4));

    SceneStack even(kGrid, -9999.0);
    even.add_observation(BandId::B4, "2021-09-05", pair(0.1, 0.0));
    even.add_observation(BandId::B4, "2021-10-05", pair(0.4, 0.0));
    CHECK(seasonal_median(even, BandId::B4, Season::Spring, 2021).at(0, 0) == doctest::Approx(0.25));

    const auto autumn = seasonal_median(s, BandId::B4, Season::Autumn, 2021);
    CHECK(autumn.is_nodata(autumn.at(0, 0)));
    CHECK_THROWS_AS(seasonal_median(s, BandId::B8, Season::Spring, 2021), Error);
}

TEST_CASE("periods covered are chronological") {
    SceneStack s(kGrid, -9999.0);
    for (const char* d : {"2022-01-10", "2021-04-10", "2021-10-10", "2021-12-10"})
        s.add_observation(BandId::B2, d, pair(0.1, 0.1));
    const auto p = periods_covered(s);
    REQUIRE(p.size() == 4);
    CHECK(p[0].token() == "AUTUMN:2021");
    CHECK(p[1].token() == "SPRING:2021");
    CHECK(p[2].token() == "SURVEY:2021");
    CHECK(p[3].token() == "SUMMER:2022");
}

TEST_CASE("composites travel as a scene") {
    SceneStack s(kGrid, -9999.0);
    s.add_observation(BandId::B2, "2021-10-10", pair(0.1, 0.2));
    s.add_observation(BandId::B3, "2021-10-10", pair(0.3, 0.4));
    const auto composites = build_composites(s, periods_covered(s), {BandId::B2, BandId::B3});
    const auto scene = composites_to_scene(composites);
    CHECK(is_composite_scene(scene));
    CHECK_FALSE(is_composite_scene(s));
    CHECK(composites_from_scene(scene) == composites);
}
