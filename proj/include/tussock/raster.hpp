#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tussock {

// Sentinel-2 MSI bands admitted as input (B1, B9 and B10 are excluded), plus
// the derived grey band used for texture. Grey never appears in a scene file.
enum class BandId : std::uint8_t { B2, B3, B4, B5, B6, B7, B8, B8A, B11, B12, Grey };

inline constexpr std::size_t kInputBandCount = 10;
inline constexpr std::array<BandId, kInputBandCount> kInputBands = {
    BandId::B2, BandId::B3, BandId::B4,  BandId::B5,  BandId::B6,
    BandId::B7, BandId::B8, BandId::B8A, BandId::B11, BandId::B12};

std::string_view band_name(BandId band) noexcept;
std::optional<BandId> parse_band(std::string_view name) noexcept;
bool is_input_band(BandId band) noexcept;
// Native MSI resolution in meters (10 or 20).
int native_resolution(BandId band) noexcept;
inline std::size_t band_slot(BandId band) noexcept { return static_cast<std::size_t>(band); }

inline constexpr double kDefaultNodata = -9999.0;

// North-up grid: origin is the top-left corner, rows run southwards.
struct GridSpec {
    int width = 0;
    int height = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size = 10.0;

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    double center_x(int col) const noexcept { return origin_x + (col + 0.5) * pixel_size; }
    double center_y(int row) const noexcept { return origin_y - (row + 0.5) * pixel_size; }
    bool contains(double x, double y) const noexcept;

    bool operator==(const GridSpec&) const = default;
};

struct PixelIndex {
    int col = 0;
    int row = 0;
    bool operator==(const PixelIndex&) const = default;
};

// Pixel whose center is nearest to (x, y). Equidistant candidates resolve to
// the smaller row, then the smaller column. Throws OutOfBounds outside the
// grid extent.
PixelIndex nearest_pixel(const GridSpec& grid, double x, double y);

// Immutable single-band raster. Values are row-major.
class BandRaster {
public:
    BandRaster() = default;
    BandRaster(GridSpec grid, std::vector<double> values, double nodata = kDefaultNodata);
    BandRaster(GridSpec grid, double fill, double nodata = kDefaultNodata);

    const GridSpec& grid() const noexcept { return grid_; }
    int width() const noexcept { return grid_.width; }
    int height() const noexcept { return grid_.height; }
    double pixel_size() const noexcept { return grid_.pixel_size; }
    double nodata() const noexcept { return nodata_; }
    std::span<const double> values() const noexcept { return values_; }

    double at(int col, int row) const noexcept {
        return values_[static_cast<std::size_t>(row) * grid_.width + col];
    }
    bool is_nodata(double v) const noexcept { return std::isnan(v) || v == nodata_; }
    bool valid(int col, int row) const noexcept { return !is_nodata(at(col, row)); }

    bool operator==(const BandRaster& other) const;

private:
    GridSpec grid_;
    std::vector<double> values_;
    double nodata_ = kDefaultNodata;
};

BandRaster resample_nn(const BandRaster& raster, double target_pixel_size);

// Value at the pixel nearest to (x, y); nullopt for nodata.
std::optional<double> sample_at(const BandRaster& raster, double x, double y);

enum class CoverClass : std::uint8_t { None = 0, Low = 1, Medium = 2, High = 3 };

inline constexpr std::array<CoverClass, 4> kCoverClasses = {
    CoverClass::None, CoverClass::Low, CoverClass::Medium, CoverClass::High};

std::string_view cover_class_name(CoverClass c) noexcept;
std::optional<CoverClass> parse_cover_class(std::string_view name) noexcept;

// 0 -> None, 1-10 -> Low, 11-30 -> Medium, 31-100 -> High.
CoverClass classify_cover(int cover_percent);

struct PlotObservation {
    std::string plot_id;
    double x = 0.0;
    double y = 0.0;
    std::optional<int> cover_percent;
    CoverClass cover_class = CoverClass::None;
    int survey_year = 0;

    bool operator==(const PlotObservation&) const = default;
};

struct Observation {
    BandId band;
    std::string date;
    BandRaster raster;

    bool operator==(const Observation&) const = default;
};

// Validity for one acquisition date: 1 = cloud-free and usable.
struct ValidityMask {
    std::string date;
    std::vector<std::uint8_t> valid;

    bool operator==(const ValidityMask&) const = default;
};

// Multi-band, multi-date cube on one shared grid. Dates are opaque tokens
// here; acquisitions use ISO-8601 dates, composites use PERIOD:YEAR tokens.
class SceneStack {
public:
    SceneStack() = default;
    explicit SceneStack(GridSpec grid, double nodata = kDefaultNodata);

    const GridSpec& grid() const noexcept { return grid_; }
    double nodata() const noexcept { return nodata_; }
    const std::vector<Observation>& observations() const noexcept { return observations_; }
    const std::vector<ValidityMask>& masks() const noexcept { return masks_; }

    void add_observation(BandId band, std::string date, BandRaster raster);
    void add_mask(std::string date, std::vector<std::uint8_t> valid);

    const Observation* find(BandId band, std::string_view date) const noexcept;
    // nullptr when no mask was supplied for the date (all pixels usable).
    const ValidityMask* mask_for(std::string_view date) const noexcept;
    bool has_band(BandId band) const noexcept;
    std::vector<std::string> dates() const;

    bool operator==(const SceneStack&) const = default;

private:
    GridSpec grid_;
    double nodata_ = kDefaultNodata;
    std::vector<Observation> observations_;
    std::vector<ValidityMask> masks_;
};

}  // namespace tussock
