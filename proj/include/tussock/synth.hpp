#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tussock/compositing.hpp"
#include "tussock/feature_matrix.hpp"
#include "tussock/indices.hpp"
#include "tussock/raster.hpp"
#include "tussock/registry.hpp"
#include "tussock/texture.hpp"

namespace tussock {

using Spectrum = std::array<double, kInputBandCount>;  // kInputBands order
using SeasonalSpectra = std::array<Spectrum, 4>;       // kSeasons order

// Two-endmember phenology model. A pixel's tussock fraction is
//   f = (1 - mixing_weight) * class_cover[class] + mixing_weight * cover_percent / 100,
// scaled by (1 +/- patchiness[class]) with a per-pixel sign that is fixed
// over time, and its reflectance is (1 - f) * native + f * tussock plus
// Gaussian noise per observation.
struct PhenologyProfile {
    std::string name;
    std::string description;
    SeasonalSpectra native{};
    SeasonalSpectra tussock{};
    double mixing_weight = 0.0;
    std::array<double, 4> class_cover{};
    std::array<double, 4> patchiness{};
    std::array<double, 4> class_proportions{0.25, 0.25, 0.25, 0.25};
    double noise_sigma = 0.0;
    double cloud_value = 0.7;  // reflectance written under a cloud
};

// Presets from a profiles document ({"presets": {name: {...}}}).
std::map<std::string, PhenologyProfile> load_profiles(std::string_view json_text);
// Presets compiled from config/profiles.json.
const std::map<std::string, PhenologyProfile>& builtin_profiles();
const PhenologyProfile& builtin_profile(std::string_view name);

struct SynthParams {
    int width = 64;
    int height = 64;
    std::size_t n_plots = 200;
    int dates_per_season = 2;
    double cloud_fraction = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> survey_years = {2021, 2022};
    double origin_x = 300000.0;
    double origin_y = 5800000.0;
    double pixel_size = 10.0;
};

struct SyntheticScene {
    SceneStack scene;
    std::vector<PlotObservation> plots;
};

// Acquisitions cover the cycle Autumn Y .. Summer Y+1 of every survey year,
// dates spread evenly inside each season. Plots sit at the centres of
// equal square blocks that share one cover; the remaining blocks get random
// covers. Masks (present when cloud_fraction > 0) drop observations at random
// and the dropped pixels read cloud_value. Values are float32-representable.
SyntheticScene generate_scene(const PhenologyProfile& profile, const SynthParams& params);

// Deliberately naive recomputation of a model's features straight from a raw
// acquisition stack: full sorts for medians, a separate direct formula
// interpreter, brute-force co-occurrence pair enumeration. Refuses scenes
// larger than 64x64.
FeatureMatrix oracle_features(const SceneStack& scene, std::span<const PlotObservation> plots,
                              const ModelConfig& config, const TextureParams& texture = {},
                              const IndexRegistry& indices = IndexRegistry::builtin());

// Direct recursive-descent evaluation of a formula string (used by the oracle).
double interpret_formula(std::string_view formula, const std::map<std::string, double>& parameters,
                         std::span<const double> band_values);

}  // namespace tussock
