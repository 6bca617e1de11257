#include "tussock/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "tussock/embedded_config.hpp"
#include "tussock/errors.hpp"
#include "tussock/rng.hpp"

namespace tussock {

namespace {

using nlohmann::json;

constexpr std::uint64_t kLayoutStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

int month_days(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : kDays[month - 1];
}

Date add_days(Date d, int days) {
    d.day += days;
    while (d.day > month_days(d.year, d.month)) {
        d.day -= month_days(d.year, d.month);
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

// First day of the season in the cycle of survey year y.
Date season_start(Season s, int y) {
    switch (s) {
    case Season::Autumn: return {y, 3, 1};
    case Season::Winter: return {y, 6, 1};
    case Season::Spring: return {y, 9, 1};
    case Season::Summer: return {y, 12, 1};
    }
    return {y, 3, 1};
}

int season_length(Season s, int y) {
    int days = 0;
    const Date start = season_start(s, y);
    for (int k = 0; k < 3; ++k) {
        const int m = (start.month - 1 + k) % 12 + 1;
        days += month_days(start.month + k > 12 ? y + 1 : y, m);
    }
    return days;
}

std::array<double, 4> per_class(const json& j, const char* key) {
    std::array<double, 4> out{};
    const auto& obj = j.at(key);
    for (CoverClass c : kCoverClasses)
        out[static_cast<std::size_t>(c)] = obj.at(std::string(cover_class_name(c))).get<double>();
    return out;
}

SeasonalSpectra spectra(const json& j, const std::string& where) {
    SeasonalSpectra out{};
    for (Season s : kSeasons) {
        const auto v = j.at(std::string(season_name(s))).get<std::vector<double>>();
        if (v.size() != kInputBandCount)
            raise(ErrorCode::Configuration, where + " " + std::string(season_name(s)) + " needs " +
                                                std::to_string(kInputBandCount) + " band values");
        for (std::size_t b = 0; b < kInputBandCount; ++b) {
            if (!(v[b] >= 0.0 && v[b] <= 1.0))
                raise(ErrorCode::Configuration, where + " reflectance outside [0, 1]");
            out[static_cast<std::size_t>(s)][b] = v[b];
        }
    }
    return out;
}

int draw_percent(CoverClass c, Rng& rng) {
    switch (c) {
    case CoverClass::None: return 0;
    case CoverClass::Low: return 1 + static_cast<int>(rng.below(10));
    case CoverClass::Medium: return 11 + static_cast<int>(rng.below(20));
    case CoverClass::High: return 31 + static_cast<int>(rng.below(70));
    }
    return 0;
}

CoverClass draw_class(const std::array<double, 4>& cumulative, Rng& rng) {
    const double u = rng.uniform() * cumulative.back();
    for (std::size_t k = 0; k < 3; ++k)
        if (u < cumulative[k]) return static_cast<CoverClass>(k);
    return CoverClass::High;
}

}  // namespace

std::map<std::string, PhenologyProfile> load_profiles(std::string_view json_text) {
    std::map<std::string, PhenologyProfile> out;
    try {
        const json doc = json::parse(json_text);
        for (const auto& [name, p] : doc.at("presets").items()) {
            PhenologyProfile prof;
            prof.name = name;
            prof.description = p.value("description", "");
            prof.native = spectra(p.at("endmembers").at("native"), "profile " + name + " native");
            prof.tussock = spectra(p.at("endmembers").at("tussock"), "profile " + name + " tussock");
            prof.mixing_weight = p.at("mixing_weight").get<double>();
            prof.class_cover = per_class(p, "class_cover");
            prof.patchiness = per_class(p, "patchiness");
            prof.class_proportions = per_class(p, "class_proportions");
            prof.noise_sigma = p.at("noise_sigma").get<double>();
            prof.cloud_value = p.value("cloud_value", 0.7);
            if (!(prof.mixing_weight >= 0.0 && prof.mixing_weight <= 1.0))
                raise(ErrorCode::Configuration, "profile " + name + ": mixing_weight outside [0, 1]");
            if (!(prof.noise_sigma >= 0.0))
                raise(ErrorCode::Configuration, "profile " + name + ": noise_sigma must be >= 0");
            double total = 0.0;
            for (double v : prof.class_proportions) {
                if (!(v >= 0.0)) raise(ErrorCode::Configuration, "profile " + name + ": negative class proportion");
                total += v;
            }
            if (!(total > 0.0)) raise(ErrorCode::Configuration, "profile " + name + ": class proportions sum to 0");
            for (double& v : prof.class_proportions) v /= total;
            out.emplace(name, std::move(prof));
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::Configuration, std::string("profiles: ") + e.what());
    }
    return out;
}

const std::map<std::string, PhenologyProfile>& builtin_profiles() {
    static const auto profiles = load_profiles(embedded::profiles_json());
    return profiles;
}

const PhenologyProfile& builtin_profile(std::string_view name) {
    const auto& all = builtin_profiles();
    auto it = all.find(std::string(name));
    if (it == all.end()) {
        std::string known;
        for (const auto& [k, v] : all) known += (known.empty() ? "" : ", ") + k;
        raise(ErrorCode::Configuration, "unknown synthetic preset '" + std::string(name) + "' (known: " + known + ")");
    }
    return it->second;
}

SyntheticScene generate_scene(const PhenologyProfile& profile, const SynthParams& params) {
    if (params.width <= 0 || params.height <= 0)
        raise(ErrorCode::InvalidArgument, "scene dimensions must be positive");
    const std::size_t pixels = static_cast<std::size_t>(params.width) * static_cast<std::size_t>(params.height);
    if (params.n_plots == 0) raise(ErrorCode::InvalidArgument, "at least one plot is required");
    if (params.n_plots > pixels)
        raise(ErrorCode::InvalidArgument, "cannot place " + std::to_string(params.n_plots) + " plots on " +
                                              std::to_string(pixels) + " pixels");
    if (!(params.cloud_fraction >= 0.0 && params.cloud_fraction < 1.0))
        raise(ErrorCode::InvalidArgument, "cloud fraction must lie in [0, 1)");
    if (params.dates_per_season < 1) raise(ErrorCode::InvalidArgument, "need at least one date per season");
    if (params.survey_years.empty()) raise(ErrorCode::InvalidArgument, "need at least one survey year");

    const int w = params.width, h = params.height;
    int block = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(pixels) / params.n_plots))));
    while (block > 1 && static_cast<std::size_t>(w / block) * static_cast<std::size_t>(h / block) < params.n_plots)
        --block;
    const int bw = w / block, bh = h / block;                          // whole blocks
    const int gw = (w + block - 1) / block, gh = (h + block - 1) / block;  // incl. partial edge blocks

    Rng layout(derive_seed(params.seed, kLayoutStream));
    std::array<double, 4> cumulative{};
    std::partial_sum(profile.class_proportions.begin(), profile.class_proportions.end(), cumulative.begin());

    std::vector<CoverClass> block_class(static_cast<std::size_t>(gw) * gh);
    std::vector<int> block_percent(block_class.size());
    for (std::size_t b = 0; b < block_class.size(); ++b) {
        block_class[b] = draw_class(cumulative, layout);
        block_percent[b] = draw_percent(block_class[b], layout);
    }
    std::vector<double> sign(pixels);
    for (double& s : sign) s = layout.bernoulli(0.5) ? 1.0 : -1.0;

    std::vector<std::size_t> candidates(static_cast<std::size_t>(bw) * bh);
    std::iota(candidates.begin(), candidates.end(), 0);
    for (std::size_t i = 0; i < params.n_plots; ++i)
        std::swap(candidates[i], candidates[i + layout.below(candidates.size() - i)]);
    candidates.resize(params.n_plots);
    std::sort(candidates.begin(), candidates.end());

    GridSpec grid{w, h, params.origin_x, params.origin_y, params.pixel_size};
    SyntheticScene out{SceneStack(grid), {}};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const int bx = static_cast<int>(candidates[i] % static_cast<std::size_t>(bw));
        const int by = static_cast<int>(candidates[i] / static_cast<std::size_t>(bw));
        const std::size_t b = static_cast<std::size_t>(by) * gw + bx;
        PlotObservation p;
        char id[32];
        std::snprintf(id, sizeof id, "P%05zu", i + 1);
        p.plot_id = id;
        p.x = grid.center_x(bx * block + block / 2);
        p.y = grid.center_y(by * block + block / 2);
        p.cover_percent = block_percent[b];
        p.cover_class = block_class[b];
        p.survey_year = params.survey_years[layout.below(params.survey_years.size())];
        out.plots.push_back(std::move(p));
    }

    // Tussock fraction per pixel, fixed over time.
    std::vector<double> fraction(pixels);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            const std::size_t b = static_cast<std::size_t>(r / block) * gw + c / block;
            const auto k = static_cast<std::size_t>(block_class[b]);
            const double f = (1.0 - profile.mixing_weight) * profile.class_cover[k] +
                             profile.mixing_weight * block_percent[b] / 100.0;
            fraction[i] = f * (1.0 + profile.patchiness[k] * sign[i]);
        }

    Rng noise(derive_seed(params.seed, kNoiseStream));
    auto clamp_f32 = [](double v) { return static_cast<double>(static_cast<float>(std::clamp(v, 0.0, 1.0))); };
    for (int year : params.survey_years) {
        for (Season s : kSeasons) {
            const Date start = season_start(s, year);
            const int length = season_length(s, year);
            for (int k = 0; k < params.dates_per_season; ++k) {
                const int offset = static_cast<int>(std::floor((k + 0.5) * length / params.dates_per_season));
                const std::string date = format_iso_date(add_days(start, offset));
                std::vector<std::uint8_t> valid(pixels, 1);
                if (params.cloud_fraction > 0.0)
                    for (auto& v : valid) v = noise.bernoulli(params.cloud_fraction) ? 0 : 1;
                const auto& nat = profile.native[static_cast<std::size_t>(s)];
                const auto& tus = profile.tussock[static_cast<std::size_t>(s)];
                for (std::size_t bi = 0; bi < kInputBandCount; ++bi) {
                    std::vector<double> values(pixels);
                    for (std::size_t i = 0; i < pixels; ++i) {
                        const double base = valid[i] ? (1.0 - fraction[i]) * nat[bi] + fraction[i] * tus[bi]
                                                     : profile.cloud_value;
                        values[i] = clamp_f32(base + profile.noise_sigma * noise.normal());
                    }
                    out.scene.add_observation(kInputBands[bi], date, BandRaster(grid, std::move(values)));
                }
                if (params.cloud_fraction > 0.0) out.scene.add_mask(date, std::move(valid));
            }
        }
    }
    return out;
}

}  // namespace tussock
