#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tussock/raster.hpp"

namespace tussock {

struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

// Strict YYYY-MM-DD with calendar validation.
std::optional<Date> parse_iso_date(std::string_view text) noexcept;
std::string format_iso_date(const Date& d);

// Meteorological seasons: Autumn Mar-May, Winter Jun-Aug, Spring Sep-Nov,
// Summer Dec-Feb.
enum class Season : std::uint8_t { Autumn, Winter, Spring, Summer };

inline constexpr std::array<Season, 4> kSeasons = {Season::Autumn, Season::Winter,
                                                   Season::Spring, Season::Summer};

std::string_view season_name(Season s) noexcept;
std::optional<Season> parse_season(std::string_view name) noexcept;

Season season_of(const Date& d) noexcept;
// Year label of the season containing d. December belongs to the summer
// labelled with the following year.
int season_year(const Date& d) noexcept;

// A compositing window: one meteorological season of a labelled year, or the
// September-December field survey period of a year.
struct CompositePeriod {
    enum class Kind : std::uint8_t { Season, Survey };

    Kind kind = Kind::Season;
    Season season = Season::Autumn;
    int year = 0;

    static CompositePeriod of_season(Season s, int year) { return {Kind::Season, s, year}; }
    static CompositePeriod survey(int year) { return {Kind::Survey, Season::Spring, year}; }

    bool contains(const Date& d) const noexcept;
    // "AUTUMN:2021", "SUMMER:2022", "SURVEY:2021".
    std::string token() const;
    static std::optional<CompositePeriod> parse(std::string_view token) noexcept;
    // Period name without the year ("SPRING", "SURVEY").
    std::string_view kind_name() const noexcept;

    auto operator<=>(const CompositePeriod&) const = default;
};

struct SeasonalComposite {
    CompositePeriod period;
    std::map<BandId, BandRaster> bands;

    const BandRaster& band(BandId b) const;
    bool operator==(const SeasonalComposite&) const = default;
};

// Per-pixel median of the band over observations inside the period whose mask
// bit is set and whose value is not nodata. Even counts average the two middle
// values; pixels with no valid observation are nodata. Throws MissingBand if
// the band never occurs in the stack.
BandRaster seasonal_median(const SceneStack& stack, BandId band, const CompositePeriod& period);
BandRaster seasonal_median(const SceneStack& stack, BandId band, Season season, int year_label);

std::vector<SeasonalComposite> build_composites(const SceneStack& stack,
                                                const std::vector<CompositePeriod>& periods,
                                                const std::vector<BandId>& bands);

// Year cycle used for a survey year Y: Autumn/Winter/Spring of Y and the
// summer labelled Y+1 (Dec Y - Feb Y+1).
CompositePeriod cycle_period(Season s, int survey_year) noexcept;

// Every season composite and survey period composite the acquisitions in the
// stack can contribute to, in chronological order.
std::vector<CompositePeriod> periods_covered(const SceneStack& stack);

// Composites travel as STCK1 scenes whose date tokens are period tokens.
SceneStack composites_to_scene(const std::vector<SeasonalComposite>& composites);
std::vector<SeasonalComposite> composites_from_scene(const SceneStack& stack);
// True when every date token in the stack is a period token.
bool is_composite_scene(const SceneStack& stack);

}  // namespace tussock
