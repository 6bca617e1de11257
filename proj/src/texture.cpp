#include "tussock/texture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tussock/errors.hpp"

namespace tussock {

QuantizedRaster quantize(const BandRaster& band, int levels) {
    if (levels < 2) raise(ErrorCode::InvalidArgument, "quantization needs at least 2 levels");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : band.values()) {
        if (band.is_nodata(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    QuantizedRaster q{band.width(), band.height(), levels, {}};
    q.values.resize(band.grid().size(), QuantizedRaster::kNodata);
    const double range = hi - lo;
    for (std::size_t i = 0; i < q.values.size(); ++i) {
        const double v = band.values()[i];
        if (band.is_nodata(v)) continue;
        if (!(range > 0.0)) {
            q.values[i] = 0;
            continue;
        }
        const double bin = std::floor((v - lo) / range * levels);
        q.values[i] = std::clamp(static_cast<int>(bin), 0, levels - 1);
    }
    return q;
}

Glcm glcm_window(const QuantizedRaster& q, int col, int row, int window_radius,
                 std::span<const Offset> offsets) {
    const int c0 = std::max(0, col - window_radius), c1 = std::min(q.width - 1, col + window_radius);
    const int r0 = std::max(0, row - window_radius), r1 = std::min(q.height - 1, row + window_radius);
    if (c0 > c1 || r0 > r1)
        raise(ErrorCode::OutOfBounds, "GLCM window does not intersect the raster");
    Glcm g(q.levels);
    for (const Offset& off : offsets) {
        for (int r = r0; r <= r1; ++r) {
            const int rn = r + off.dy;
            if (rn < r0 || rn > r1) continue;
            for (int c = c0; c <= c1; ++c) {
                const int cn = c + off.dx;
                if (cn < c0 || cn > c1) continue;
                const int a = q.at(c, r);
                const int b = q.at(cn, rn);
                if (a == QuantizedRaster::kNodata || b == QuantizedRaster::kNodata) continue;
                g.add_pair(a, b);
            }
        }
    }
    return g;
}

std::optional<TextureStats> glcm_stats(const Glcm& g) {
    if (g.empty()) return std::nullopt;
    const int L = g.levels();
    TextureStats s;
    double mu_i = 0.0, mu_j = 0.0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const double p = g.probability(i, j);
            if (p == 0.0) continue;
            const double d = i - j;
            s.contrast += p * d * d;
            s.dissimilarity += p * std::fabs(d);
            s.homogeneity += p / (1.0 + d * d);
            s.asm_ += p * p;
            mu_i += i * p;
            mu_j += j * p;
        }
    double var_i = 0.0, var_j = 0.0, cov = 0.0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const double p = g.probability(i, j);
            if (p == 0.0) continue;
            var_i += (i - mu_i) * (i - mu_i) * p;
            var_j += (j - mu_j) * (j - mu_j) * p;
            cov += (i - mu_i) * (j - mu_j) * p;
        }
    s.energy = std::sqrt(s.asm_);
    const double sd_i = std::sqrt(var_i), sd_j = std::sqrt(var_j);
    s.correlation = (sd_i < 1e-12 || sd_j < 1e-12) ? 0.0 : cov / (sd_i * sd_j);
    return s;
}

BandRaster grey_from(std::span<const BandRaster* const> bands) {
    if (bands.empty()) raise(ErrorCode::InvalidArgument, "grey band needs at least one member band");
    const BandRaster& first = *bands.front();
    for (const BandRaster* b : bands)
        if (!(b->grid() == first.grid()))
            raise(ErrorCode::DimensionMismatch, "grey band members do not share a grid");
    std::vector<double> out(first.grid().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double sum = 0.0;
        bool missing = false;
        for (const BandRaster* b : bands) {
            const double v = b->values()[i];
            if (b->is_nodata(v)) {
                missing = true;
                break;
            }
            sum += v;
        }
        out[i] = missing ? first.nodata() : sum / static_cast<double>(bands.size());
    }
    return BandRaster(first.grid(), std::move(out), first.nodata());
}

std::vector<std::array<double, 6>> texture_at(const BandRaster& band, const TextureParams& params,
                                              std::span<const PixelIndex> pixels) {
    const QuantizedRaster q = quantize(band, params.levels);
    std::vector<std::array<double, 6>> out(pixels.size());
    for (std::size_t p = 0; p < pixels.size(); ++p) {
        const Glcm g = glcm_window(q, pixels[p].col, pixels[p].row, params.window_radius, params.offsets);
        if (const auto stats = glcm_stats(g))
            out[p] = stats->as_array();
        else
            out[p].fill(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

std::vector<std::vector<double>> texture_features(const SeasonalComposite& composite,
                                                  const std::vector<BandId>& band_set,
                                                  const TextureParams& params,
                                                  std::span<const PixelIndex> pixels) {
    std::vector<const BandRaster*> members;
    for (BandId b : band_set) members.push_back(&composite.band(b));
    const BandRaster grey = grey_from(members);
    members.push_back(&grey);

    const std::size_t per_band = kTextureStatNames.size();
    std::vector<std::vector<double>> out(pixels.size(),
                                         std::vector<double>(members.size() * per_band));
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto stats = texture_at(*members[m], params, pixels);
        for (std::size_t p = 0; p < pixels.size(); ++p)
            std::copy(stats[p].begin(), stats[p].end(), out[p].begin() + static_cast<std::ptrdiff_t>(m * per_band));
    }
    return out;
}

}  // namespace tussock
