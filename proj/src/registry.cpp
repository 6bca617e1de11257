#include "tussock/registry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "tussock/embedded_config.hpp"
#include "tussock/errors.hpp"
#include "tussock/log.hpp"

namespace tussock {

namespace {

using nlohmann::json;

std::vector<BandId> parse_bands(const json& list, const std::string& model) {
    std::vector<BandId> out;
    for (const auto& item : list) {
        const auto name = item.get<std::string>();
        const auto band = parse_band(name);
        if (!band || !is_input_band(*band))
            raise(ErrorCode::Configuration, "model " + model + ": unknown band '" + name + "'");
        out.push_back(*band);
    }
    return out;
}

std::string grey_key(const std::vector<BandId>& members) {
    std::string key = "GREY[";
    for (BandId b : members) {
        key += band_name(b);
        key += ' ';
    }
    return key + "]";
}

}  // namespace

CompositePeriod PeriodSlot::resolve(int survey_year) const noexcept {
    return season ? cycle_period(*season, survey_year) : CompositePeriod::survey(survey_year);
}

std::string_view PeriodSlot::name() const noexcept {
    return season ? season_name(*season) : std::string_view("SURVEY");
}

std::optional<PeriodSlot> PeriodSlot::parse(std::string_view name) noexcept {
    if (name == "SURVEY") return survey();
    if (auto s = parse_season(name)) return of(*s);
    return std::nullopt;
}

std::vector<std::string> ModelConfig::column_names() const {
    std::vector<std::string> out;
    for (const auto& slot : periods) {
        const std::string suffix = "@" + std::string(slot.name());
        for (BandId b : bands) out.push_back(std::string(band_name(b)) + suffix);
        for (const auto& id : indices) out.push_back(id + suffix);
        if (uses_texture()) {
            std::vector<std::string> sources;
            for (BandId b : texture_bands) sources.emplace_back(band_name(b));
            sources.emplace_back("GREY");
            for (const auto& src : sources)
                for (auto stat : kTextureStatNames)
                    out.push_back("GLCM_" + std::string(stat) + "_" + src + suffix);
        }
    }
    return out;
}

ModelRegistry ModelRegistry::from_json(std::string_view text, const IndexRegistry& indices) {
    ModelRegistry reg;
    try {
        const json doc = json::parse(text);
        for (const auto& m : doc.at("models")) {
            ModelConfig c;
            c.id = m.at("id").get<std::string>();
            c.description = m.value("description", "");
            c.bands = parse_bands(m.value("bands", json::array()), c.id);
            c.indices = m.value("indices", std::vector<std::string>{});
            for (const auto& id : c.indices)
                if (!indices.contains(id))
                    raise(ErrorCode::Configuration, "model " + c.id + ": unknown index '" + id + "'");
            c.texture_bands = parse_bands(m.value("texture_bands", json::array()), c.id);
            for (const auto& p : m.at("periods")) {
                const auto name = p.get<std::string>();
                const auto slot = PeriodSlot::parse(name);
                if (!slot) raise(ErrorCode::Configuration, "model " + c.id + ": unknown period '" + name + "'");
                c.periods.push_back(*slot);
            }
            if (c.periods.empty()) raise(ErrorCode::Configuration, "model " + c.id + " lists no periods");
            c.expected_feature_count = m.at("expected_feature_count").get<std::size_t>();
            if (m.contains("published")) {
                const auto& p = m.at("published");
                if (p.contains("pc") && !p["pc"].is_null()) c.published.pc = p["pc"].get<int>();
                if (p.contains("oa") && !p["oa"].is_null()) c.published.oa = p["oa"].get<double>();
                if (p.contains("kappa") && !p["kappa"].is_null()) c.published.kappa = p["kappa"].get<double>();
            }
            const auto columns = c.column_names();
            if (columns.size() != c.expected_feature_count)
                raise(ErrorCode::Configuration, "model " + c.id + " declares " +
                                                    std::to_string(c.expected_feature_count) +
                                                    " features but its recipe yields " +
                                                    std::to_string(columns.size()));
            auto sorted = columns;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                raise(ErrorCode::Configuration, "model " + c.id + " repeats a feature");
            if (std::any_of(reg.models_.begin(), reg.models_.end(),
                            [&](const ModelConfig& o) { return o.id == c.id; }))
                raise(ErrorCode::Configuration, "duplicate model id " + c.id);
            reg.models_.push_back(std::move(c));
        }
        for (const auto& r : doc.value("reference_rows", json::array()))
            reg.references_.push_back(
                {r.at("label").get<std::string>(), r.at("oa").get<double>(), r.at("kappa").get<double>()});
    } catch (const json::exception& e) {
        raise(ErrorCode::Configuration, std::string("model registry: ") + e.what());
    }
    return reg;
}

const ModelRegistry& ModelRegistry::builtin() {
    static const ModelRegistry reg = from_json(embedded::models_json());
    return reg;
}

const ModelConfig& ModelRegistry::find(std::string_view id) const {
    for (const auto& m : models_)
        if (m.id == id) return m;
    raise(ErrorCode::Configuration, "unknown model id '" + std::string(id) + "'");
}

struct FeatureExtractor::Texture {
    QuantizedRaster q;
    std::unordered_map<std::size_t, std::array<double, 6>> at_pixel;
};

FeatureExtractor::FeatureExtractor(const SceneStack& scene, TextureParams texture, const IndexRegistry& indices)
    : grid_(scene.grid()), texture_(std::move(texture)), indices_(indices) {
    if (is_composite_scene(scene)) {
        for (auto& c : composites_from_scene(scene)) composites_.emplace(c.period, std::move(c));
    } else {
        raw_ = &scene;
        raw_periods_ = periods_covered(scene);
    }
}

FeatureExtractor::FeatureExtractor(std::vector<SeasonalComposite> composites, TextureParams texture,
                                   const IndexRegistry& indices)
    : texture_(std::move(texture)), indices_(indices) {
    if (composites.empty() || composites.front().bands.empty())
        raise(ErrorCode::EmptyInput, "no composites supplied");
    grid_ = composites.front().bands.begin()->second.grid();
    for (auto& c : composites) {
        for (const auto& [b, r] : c.bands)
            if (!(r.grid() == grid_))
                raise(ErrorCode::DimensionMismatch, "composite " + c.period.token() + " band " +
                                                        std::string(band_name(b)) + " is on a different grid");
        const auto period = c.period;
        composites_.emplace(period, std::move(c));
    }
}

FeatureExtractor::~FeatureExtractor() = default;

const SeasonalComposite& FeatureExtractor::composite(const CompositePeriod& period) {
    if (auto it = composites_.find(period); it != composites_.end()) return it->second;
    if (!raw_ || std::find(raw_periods_.begin(), raw_periods_.end(), period) == raw_periods_.end())
        raise(ErrorCode::Configuration, "composite " + period.token() + " is not available from the scene");
    std::vector<BandId> bands;
    for (BandId b : kInputBands)
        if (raw_->has_band(b)) bands.push_back(b);
    auto built = build_composites(*raw_, {period}, bands);
    logger()->debug("built composite {} ({} bands)", period.token(), bands.size());
    return composites_.emplace(period, std::move(built.front())).first->second;
}

const BandRaster& FeatureExtractor::band(const CompositePeriod& p, BandId b, const std::string& model_id) {
    const auto& c = composite(p);
    auto it = c.bands.find(b);
    if (it == c.bands.end())
        raise(ErrorCode::Configuration, "model " + model_id + " needs band " + std::string(band_name(b)) +
                                            " in composite " + p.token() + ", which lacks it");
    return it->second;
}

const BandRaster& FeatureExtractor::index_raster(const CompositePeriod& p, const std::string& index_id,
                                                 const std::string& model_id) {
    const auto key = std::make_pair(p, index_id);
    if (auto it = index_cache_.find(key); it != index_cache_.end()) return it->second;
    const auto& def = indices_.find(index_id);
    for (BandId b : def.required_bands) band(p, b, model_id);
    return index_cache_.emplace(key, compute_index(def, composite(p))).first->second;
}

FeatureExtractor::Texture& FeatureExtractor::texture(const CompositePeriod& p, const std::vector<BandId>& members,
                                                     const std::string& model_id) {
    const std::string name = members.size() == 1 ? std::string(band_name(members.front())) : grey_key(members);
    const auto key = std::make_pair(p, name);
    if (auto it = texture_cache_.find(key); it != texture_cache_.end()) return *it->second;
    auto t = std::make_unique<Texture>();
    if (members.size() == 1) {
        t->q = quantize(band(p, members.front(), model_id), texture_.levels);
    } else {
        std::vector<const BandRaster*> rasters;
        for (BandId b : members) rasters.push_back(&band(p, b, model_id));
        t->q = quantize(grey_from(rasters), texture_.levels);
    }
    return *texture_cache_.emplace(key, std::move(t)).first->second;
}

FeatureMatrix FeatureExtractor::assemble(const ModelConfig& config, std::span<const PlotObservation> plots,
                                         std::size_t* dropped) {
    const auto columns = config.column_names();
    if (columns.size() != config.expected_feature_count)
        raise(ErrorCode::Configuration, "model " + config.id + " yields " + std::to_string(columns.size()) +
                                            " columns, expected " +
                                            std::to_string(config.expected_feature_count));
    if (texture_.levels < 2) raise(ErrorCode::InvalidArgument, "GLCM levels must be at least 2");
    if (texture_.window_radius < 1) raise(ErrorCode::InvalidArgument, "GLCM window radius must be at least 1");
    if (texture_.offsets.empty()) raise(ErrorCode::InvalidArgument, "GLCM needs at least one offset");

    std::vector<PixelIndex> pixels;
    pixels.reserve(plots.size());
    for (const auto& plot : plots) {
        try {
            pixels.push_back(nearest_pixel(grid_, plot.x, plot.y));
        } catch (const Error& e) {
            raise(e.code(), "plot " + plot.plot_id + ": " + e.what());
        }
    }

    FeatureMatrix out(columns);
    std::vector<double> row(columns.size());
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < plots.size(); ++i) {
        const auto& plot = plots[i];
        const PixelIndex px = pixels[i];
        const std::size_t flat = static_cast<std::size_t>(px.row) * grid_.width + px.col;
        std::size_t k = 0;
        for (const auto& slot : config.periods) {
            const CompositePeriod p = slot.resolve(plot.survey_year);
            for (BandId b : config.bands) {
                const auto& r = band(p, b, config.id);
                row[k++] = r.valid(px.col, px.row) ? r.at(px.col, px.row)
                                                   : std::numeric_limits<double>::quiet_NaN();
            }
            for (const auto& id : config.indices) {
                const auto& r = index_raster(p, id, config.id);
                row[k++] = r.valid(px.col, px.row) ? r.at(px.col, px.row)
                                                   : std::numeric_limits<double>::quiet_NaN();
            }
            if (config.uses_texture()) {
                std::vector<std::vector<BandId>> sources;
                for (BandId b : config.texture_bands) sources.push_back({b});
                sources.push_back(config.texture_bands);
                for (const auto& members : sources) {
                    Texture& t = texture(p, members, config.id);
                    auto it = t.at_pixel.find(flat);
                    if (it == t.at_pixel.end()) {
                        std::array<double, 6> v;
                        if (const auto stats = glcm_stats(
                                glcm_window(t.q, px.col, px.row, texture_.window_radius, texture_.offsets)))
                            v = stats->as_array();
                        else
                            v.fill(std::numeric_limits<double>::quiet_NaN());
                        it = t.at_pixel.emplace(flat, v).first;
                    }
                    for (double v : it->second) row[k++] = v;
                }
            }
        }
        if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            out.add_row(plot.plot_id, plot.cover_class, plot.survey_year, row);
        } else {
            ++skipped;
            logger()->debug("model {}: plot {} has a missing feature", config.id, plot.plot_id);
        }
    }
    if (skipped > 0)
        logger()->warn("model {}: dropped {} of {} plots with missing features", config.id, skipped, plots.size());
    if (dropped) *dropped = skipped;
    return out;
}

FeatureMatrix assemble_features(const ModelConfig& config, const std::vector<SeasonalComposite>& composites,
                                std::span<const PlotObservation> plots, const TextureParams& texture,
                                const IndexRegistry& indices) {
    FeatureExtractor fx(composites, texture, indices);
    return fx.assemble(config, plots);
}

}  // namespace tussock
