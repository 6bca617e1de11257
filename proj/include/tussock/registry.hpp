#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tussock/compositing.hpp"
#include "tussock/feature_matrix.hpp"
#include "tussock/indices.hpp"
#include "tussock/raster.hpp"
#include "tussock/texture.hpp"

namespace tussock {

// A composite slot relative to a plot's survey year: one season of the year
// cycle, or the survey period itself.
struct PeriodSlot {
    std::optional<Season> season;  // nullopt: survey period

    static PeriodSlot survey() { return {}; }
    static PeriodSlot of(Season s) { return {s}; }

    CompositePeriod resolve(int survey_year) const noexcept;
    std::string_view name() const noexcept;
    static std::optional<PeriodSlot> parse(std::string_view name) noexcept;

    bool operator==(const PeriodSlot&) const = default;
};

struct PublishedScores {
    std::optional<int> pc;
    std::optional<double> oa;
    std::optional<double> kappa;
};

struct ModelConfig {
    std::string id;
    std::string description;
    std::vector<BandId> bands;
    std::vector<std::string> indices;
    std::vector<BandId> texture_bands;  // the grey mean of these is appended
    std::vector<PeriodSlot> periods;
    std::size_t expected_feature_count = 0;
    PublishedScores published;

    bool uses_texture() const noexcept { return !texture_bands.empty(); }
    // Per period: bands, then indices, then six statistics per texture band
    // and grey.
    std::vector<std::string> column_names() const;
};

struct ReferenceRow {
    std::string label;
    double oa = 0.0;
    double kappa = 0.0;
};

class ModelRegistry {
public:
    static ModelRegistry from_json(std::string_view text, const IndexRegistry& indices = IndexRegistry::builtin());
    // Registry compiled from config/models.json at build time.
    static const ModelRegistry& builtin();

    const std::vector<ModelConfig>& models() const noexcept { return models_; }
    const std::vector<ReferenceRow>& reference_rows() const noexcept { return references_; }
    const ModelConfig& find(std::string_view id) const;

private:
    std::vector<ModelConfig> models_;
    std::vector<ReferenceRow> references_;
};

// Lazily composites a scene and caches composites, index rasters and texture
// statistics so several models over the same scene share the work. Accepts a
// raw acquisition stack, a composite scene, or ready-made composites.
class FeatureExtractor {
public:
    explicit FeatureExtractor(const SceneStack& scene, TextureParams texture = {},
                              const IndexRegistry& indices = IndexRegistry::builtin());
    explicit FeatureExtractor(std::vector<SeasonalComposite> composites, TextureParams texture = {},
                              const IndexRegistry& indices = IndexRegistry::builtin());
    ~FeatureExtractor();
    FeatureExtractor(const FeatureExtractor&) = delete;
    FeatureExtractor& operator=(const FeatureExtractor&) = delete;

    const TextureParams& texture_params() const noexcept { return texture_; }
    const IndexRegistry& indices() const noexcept { return indices_; }
    const GridSpec& grid() const noexcept { return grid_; }

    // Composite for the period; Configuration error when it cannot be formed.
    const SeasonalComposite& composite(const CompositePeriod& period);

    // Rows with a missing value are dropped and counted in *dropped.
    FeatureMatrix assemble(const ModelConfig& config, std::span<const PlotObservation> plots,
                           std::size_t* dropped = nullptr);

private:
    struct Texture;

    const BandRaster& band(const CompositePeriod& p, BandId b, const std::string& model_id);
    const BandRaster& index_raster(const CompositePeriod& p, const std::string& index_id,
                                   const std::string& model_id);
    Texture& texture(const CompositePeriod& p, const std::vector<BandId>& members,
                     const std::string& model_id);

    const SceneStack* raw_ = nullptr;
    std::vector<CompositePeriod> raw_periods_;
    GridSpec grid_;
    TextureParams texture_;
    const IndexRegistry& indices_;
    std::map<CompositePeriod, SeasonalComposite> composites_;
    std::map<std::pair<CompositePeriod, std::string>, BandRaster> index_cache_;
    std::map<std::pair<CompositePeriod, std::string>, std::unique_ptr<Texture>> texture_cache_;
};

FeatureMatrix assemble_features(const ModelConfig& config, const std::vector<SeasonalComposite>& composites,
                                std::span<const PlotObservation> plots, const TextureParams& texture = {},
                                const IndexRegistry& indices = IndexRegistry::builtin());

}  // namespace tussock
