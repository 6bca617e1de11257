#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tussock/compositing.hpp"
#include "tussock/raster.hpp"

namespace tussock {

struct QuantizedRaster {
    static constexpr int kNodata = -1;

    int width = 0;
    int height = 0;
    int levels = 0;
    std::vector<int> values;  // row-major, kNodata for missing pixels

    int at(int col, int row) const noexcept {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

// Linear min-max binning of the valid pixels into [0, levels-1], with min and
// max taken over the whole raster. A constant raster maps to level 0.
QuantizedRaster quantize(const BandRaster& band, int levels);

// (dx, dy) with dy pointing down the rows.
struct Offset {
    int dx = 0;
    int dy = 0;
    bool operator==(const Offset&) const = default;
};

inline const std::vector<Offset>& default_offsets() {
    static const std::vector<Offset> offsets = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    return offsets;
}

struct TextureParams {
    int levels = 32;
    int window_radius = 2;
    std::vector<Offset> offsets = default_offsets();

    bool operator==(const TextureParams&) const = default;
};

// Symmetric, normalized co-occurrence matrix. Counts are kept so symmetry can
// be checked exactly.
class Glcm {
public:
    explicit Glcm(int levels) : levels_(levels), counts_(static_cast<std::size_t>(levels) * levels, 0) {}

    int levels() const noexcept { return levels_; }
    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return total_ == 0; }
    std::uint64_t count(int i, int j) const noexcept { return counts_[index(i, j)]; }
    double probability(int i, int j) const noexcept {
        return total_ == 0 ? 0.0 : static_cast<double>(counts_[index(i, j)]) / static_cast<double>(total_);
    }

    void add_pair(int a, int b) noexcept {
        ++counts_[index(a, b)];
        ++counts_[index(b, a)];
        total_ += 2;
    }

private:
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * levels_ + j;
    }

    int levels_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// Pairs (p, p + offset) with both pixels inside the clipped window centred on
// (col, row) and neither nodata, accumulated symmetrically over all offsets.
Glcm glcm_window(const QuantizedRaster& q, int col, int row, int window_radius,
                 std::span<const Offset> offsets);

struct TextureStats {
    double contrast = 0.0;
    double dissimilarity = 0.0;
    double homogeneity = 0.0;
    double energy = 0.0;
    double correlation = 0.0;
    double asm_ = 0.0;  // angular second moment

    std::array<double, 6> as_array() const noexcept {
        return {contrast, dissimilarity, homogeneity, energy, correlation, asm_};
    }
};

inline constexpr std::array<std::string_view, 6> kTextureStatNames = {
    "contrast", "dissimilarity", "homogeneity", "energy", "correlation", "asm"};

// nullopt for an empty GLCM. Correlation is 0 when a marginal deviation is
// below 1e-12.
std::optional<TextureStats> glcm_stats(const Glcm& g);

// Per-pixel unweighted mean of the bands; nodata where any member is.
BandRaster grey_from(std::span<const BandRaster* const> bands);

// The six statistics of one raster at each pixel (NaN for an empty GLCM).
std::vector<std::array<double, 6>> texture_at(const BandRaster& band, const TextureParams& params,
                                              std::span<const PixelIndex> pixels);

// Texture features at the given pixels: for each band of band_set followed by
// the derived grey band, the six statistics in kTextureStatNames order.
// Missing values (empty GLCM) are NaN.
std::vector<std::vector<double>> texture_features(const SeasonalComposite& composite,
                                                  const std::vector<BandId>& band_set,
                                                  const TextureParams& params,
                                                  std::span<const PixelIndex> pixels);

}  // namespace tussock
