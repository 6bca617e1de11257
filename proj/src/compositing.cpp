#include "tussock/compositing.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <tuple>

#include "tussock/errors.hpp"

namespace tussock {

namespace {

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : kDays[month - 1];
}

int start_month(Season s) {
    switch (s) {
    case Season::Autumn: return 3;
    case Season::Winter: return 6;
    case Season::Spring: return 9;
    case Season::Summer: return 12;
    }
    return 3;
}

// (year, month, tiebreak) of the first day covered by a period.
std::tuple<int, int, int> chronological_key(const CompositePeriod& p) {
    if (p.kind == CompositePeriod::Kind::Survey) return {p.year, 9, 1};
    if (p.season == Season::Summer) return {p.year - 1, 12, 0};
    return {p.year, start_month(p.season), 0};
}

double median_in_place(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view text) noexcept {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    Date d;
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day))
        return std::nullopt;
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        return std::nullopt;
    return d;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string_view season_name(Season s) noexcept {
    switch (s) {
    case Season::Autumn: return "AUTUMN";
    case Season::Winter: return "WINTER";
    case Season::Spring: return "SPRING";
    case Season::Summer: return "SUMMER";
    }
    return "AUTUMN";
}

std::optional<Season> parse_season(std::string_view name) noexcept {
    for (Season s : kSeasons)
        if (season_name(s) == name) return s;
    return std::nullopt;
}

Season season_of(const Date& d) noexcept {
    switch (d.month) {
    case 3: case 4: case 5: return Season::Autumn;
    case 6: case 7: case 8: return Season::Winter;
    case 9: case 10: case 11: return Season::Spring;
    default: return Season::Summer;
    }
}

int season_year(const Date& d) noexcept { return d.month == 12 ? d.year + 1 : d.year; }

bool CompositePeriod::contains(const Date& d) const noexcept {
    if (kind == Kind::Survey) return d.year == year && d.month >= 9;
    return season_of(d) == season && season_year(d) == year;
}

std::string CompositePeriod::token() const {
    return std::string(kind_name()) + ":" + std::to_string(year);
}

std::string_view CompositePeriod::kind_name() const noexcept {
    return kind == Kind::Survey ? std::string_view("SURVEY") : season_name(season);
}

std::optional<CompositePeriod> CompositePeriod::parse(std::string_view token) noexcept {
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    int year = 0;
    if (!parse_int(token.substr(colon + 1), year)) return std::nullopt;
    const auto name = token.substr(0, colon);
    if (name == "SURVEY") return CompositePeriod::survey(year);
    if (auto s = parse_season(name)) return CompositePeriod::of_season(*s, year);
    return std::nullopt;
}

const BandRaster& SeasonalComposite::band(BandId b) const {
    auto it = bands.find(b);
    if (it == bands.end())
        raise(ErrorCode::MissingBand, "composite " + period.token() + " lacks band " +
                                          std::string(band_name(b)));
    return it->second;
}

BandRaster seasonal_median(const SceneStack& stack, BandId band, const CompositePeriod& period) {
    if (!stack.has_band(band))
        raise(ErrorCode::MissingBand,
              "band " + std::string(band_name(band)) + " is absent from the scene");

    struct Source {
        const BandRaster* raster;
        const ValidityMask* mask;
    };
    std::vector<Source> sources;
    for (const auto& o : stack.observations()) {
        if (o.band != band) continue;
        const auto date = parse_iso_date(o.date);
        if (!date)
            raise(ErrorCode::InvalidArgument,
                  "observation date '" + o.date + "' is not an ISO-8601 acquisition date");
        if (period.contains(*date)) sources.push_back({&o.raster, stack.mask_for(o.date)});
    }

    const GridSpec& grid = stack.grid();
    const double nodata = stack.nodata();
    std::vector<double> out(grid.size(), nodata);
    std::vector<double> series;
    series.reserve(sources.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        series.clear();
        for (const auto& s : sources) {
            if (s.mask && !s.mask->valid[i]) continue;
            const double v = s.raster->values()[i];
            if (s.raster->is_nodata(v)) continue;
            series.push_back(v);
        }
        if (!series.empty()) out[i] = median_in_place(series);
    }
    return BandRaster(grid, std::move(out), nodata);
}

BandRaster seasonal_median(const SceneStack& stack, BandId band, Season season, int year_label) {
    return seasonal_median(stack, band, CompositePeriod::of_season(season, year_label));
}

std::vector<SeasonalComposite> build_composites(const SceneStack& stack,
                                                const std::vector<CompositePeriod>& periods,
                                                const std::vector<BandId>& bands) {
    std::vector<SeasonalComposite> out;
    out.reserve(periods.size());
    for (const auto& period : periods) {
        SeasonalComposite c{period, {}};
        for (BandId b : bands) c.bands.emplace(b, seasonal_median(stack, b, period));
        out.push_back(std::move(c));
    }
    return out;
}

CompositePeriod cycle_period(Season s, int survey_year) noexcept {
    return CompositePeriod::of_season(s, s == Season::Summer ? survey_year + 1 : survey_year);
}

std::vector<CompositePeriod> periods_covered(const SceneStack& stack) {
    std::vector<CompositePeriod> out;
    auto add = [&out](const CompositePeriod& p) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    for (const auto& token : stack.dates()) {
        const auto d = parse_iso_date(token);
        if (!d) continue;
        add(CompositePeriod::of_season(season_of(*d), season_year(*d)));
        if (d->month >= 9) add(CompositePeriod::survey(d->year));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return chronological_key(a) < chronological_key(b);
    });
    return out;
}

SceneStack composites_to_scene(const std::vector<SeasonalComposite>& composites) {
    if (composites.empty() || composites.front().bands.empty())
        raise(ErrorCode::EmptyInput, "no composites to write");
    const BandRaster& first = composites.front().bands.begin()->second;
    SceneStack stack(first.grid(), first.nodata());
    for (const auto& c : composites)
        for (const auto& [band, raster] : c.bands) stack.add_observation(band, c.period.token(), raster);
    return stack;
}

std::vector<SeasonalComposite> composites_from_scene(const SceneStack& stack) {
    std::vector<SeasonalComposite> out;
    for (const auto& o : stack.observations()) {
        const auto period = CompositePeriod::parse(o.date);
        if (!period)
            raise(ErrorCode::Parse, "date token '" + o.date + "' is not a composite period token");
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const SeasonalComposite& c) { return c.period == *period; });
        if (it == out.end()) {
            out.push_back({*period, {}});
            it = std::prev(out.end());
        }
        it->bands.emplace(o.band, o.raster);
    }
    return out;
}

bool is_composite_scene(const SceneStack& stack) {
    const auto dates = stack.dates();
    return !dates.empty() && std::all_of(dates.begin(), dates.end(), [](const std::string& t) {
        return CompositePeriod::parse(t).has_value();
    });
}

}  // namespace tussock
