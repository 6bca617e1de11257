#include "tussock/raster.hpp"

#include <algorithm>
#include <cstring>

#include "tussock/errors.hpp"

namespace tussock {

namespace {

constexpr std::array<std::string_view, 11> kBandNames = {
    "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B8A", "B11", "B12", "GREY"};

// Index along one axis for a continuous coordinate measured in pixels from the
// grid edge. Exact pixel boundaries are ties and go to the lower index.
int axis_index(double pos, int extent) {
    double whole = std::floor(pos);
    int idx = static_cast<int>(whole);
    if (whole == pos && idx > 0) --idx;
    return std::clamp(idx, 0, extent - 1);
}

void check_grid(const GridSpec& grid) {
    if (grid.width <= 0 || grid.height <= 0)
        raise(ErrorCode::InvalidArgument, "raster dimensions must be positive");
    if (!(grid.pixel_size > 0.0))
        raise(ErrorCode::InvalidArgument, "pixel size must be positive");
}

}  // namespace

std::string_view band_name(BandId band) noexcept { return kBandNames[band_slot(band)]; }

std::optional<BandId> parse_band(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kBandNames.size(); ++i)
        if (kBandNames[i] == name) return static_cast<BandId>(i);
    if (name == "B08") return BandId::B8;
    return std::nullopt;
}

bool is_input_band(BandId band) noexcept { return band != BandId::Grey; }

int native_resolution(BandId band) noexcept {
    switch (band) {
    case BandId::B5:
    case BandId::B6:
    case BandId::B7:
    case BandId::B8A:
    case BandId::B11:
    case BandId::B12: return 20;
    default: return 10;
    }
}

bool GridSpec::contains(double x, double y) const noexcept {
    return x >= origin_x && x <= origin_x + width * pixel_size && y <= origin_y &&
           y >= origin_y - height * pixel_size;
}

PixelIndex nearest_pixel(const GridSpec& grid, double x, double y) {
    if (!grid.contains(x, y))
        raise(ErrorCode::OutOfBounds, "coordinate (" + std::to_string(x) + ", " +
                                          std::to_string(y) + ") lies outside the raster extent");
    return {axis_index((x - grid.origin_x) / grid.pixel_size, grid.width),
            axis_index((grid.origin_y - y) / grid.pixel_size, grid.height)};
}

BandRaster::BandRaster(GridSpec grid, std::vector<double> values, double nodata)
    : grid_(grid), values_(std::move(values)), nodata_(nodata) {
    check_grid(grid_);
    if (values_.size() != grid_.size())
        raise(ErrorCode::DimensionMismatch,
              "raster holds " + std::to_string(values_.size()) + " values but grid is " +
                  std::to_string(grid_.width) + "x" + std::to_string(grid_.height));
}

BandRaster::BandRaster(GridSpec grid, double fill, double nodata)
    : grid_(grid), nodata_(nodata) {
    check_grid(grid_);
    values_.assign(grid_.size(), fill);
}

bool BandRaster::operator==(const BandRaster& other) const {
    // Bitwise so NaN payloads compare equal to themselves.
    return grid_ == other.grid_ &&
           std::memcmp(&nodata_, &other.nodata_, sizeof(double)) == 0 &&
           values_.size() == other.values_.size() &&
           (values_.empty() ||
            std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0);
}

BandRaster resample_nn(const BandRaster& raster, double target_pixel_size) {
    if (!(target_pixel_size > 0.0))
        raise(ErrorCode::InvalidArgument, "target pixel size must be positive");
    const GridSpec& src = raster.grid();
    if (target_pixel_size == src.pixel_size) return raster;

    const double scale = src.pixel_size / target_pixel_size;
    GridSpec dst = src;
    dst.pixel_size = target_pixel_size;
    dst.width = std::max(1, static_cast<int>(std::ceil(src.width * scale - 1e-9)));
    dst.height = std::max(1, static_cast<int>(std::ceil(src.height * scale - 1e-9)));

    std::vector<int> src_col(dst.width), src_row(dst.height);
    for (int c = 0; c < dst.width; ++c)
        src_col[c] = axis_index((c + 0.5) * target_pixel_size / src.pixel_size, src.width);
    for (int r = 0; r < dst.height; ++r)
        src_row[r] = axis_index((r + 0.5) * target_pixel_size / src.pixel_size, src.height);

    std::vector<double> out(dst.size());
    for (int r = 0; r < dst.height; ++r)
        for (int c = 0; c < dst.width; ++c)
            out[static_cast<std::size_t>(r) * dst.width + c] = raster.at(src_col[c], src_row[r]);
    return BandRaster(dst, std::move(out), raster.nodata());
}

std::optional<double> sample_at(const BandRaster& raster, double x, double y) {
    const PixelIndex px = nearest_pixel(raster.grid(), x, y);
    const double v = raster.at(px.col, px.row);
    if (raster.is_nodata(v)) return std::nullopt;
    return v;
}

std::string_view cover_class_name(CoverClass c) noexcept {
    switch (c) {
    case CoverClass::None: return "None";
    case CoverClass::Low: return "Low";
    case CoverClass::Medium: return "Medium";
    case CoverClass::High: return "High";
    }
    return "None";
}

std::optional<CoverClass> parse_cover_class(std::string_view name) noexcept {
    for (CoverClass c : kCoverClasses)
        if (cover_class_name(c) == name) return c;
    return std::nullopt;
}

CoverClass classify_cover(int cover_percent) {
    if (cover_percent < 0 || cover_percent > 100)
        raise(ErrorCode::InvalidArgument,
              "cover percent " + std::to_string(cover_percent) + " outside [0, 100]");
    if (cover_percent == 0) return CoverClass::None;
    if (cover_percent <= 10) return CoverClass::Low;
    if (cover_percent <= 30) return CoverClass::Medium;
    return CoverClass::High;
}

SceneStack::SceneStack(GridSpec grid, double nodata) : grid_(grid), nodata_(nodata) {
    check_grid(grid_);
}

void SceneStack::add_observation(BandId band, std::string date, BandRaster raster) {
    if (!is_input_band(band))
        raise(ErrorCode::InvalidArgument, "GREY is derived and cannot be stored in a scene");
    if (!(raster.grid() == grid_))
        raise(ErrorCode::DimensionMismatch, "grid mismatch for band " +
                                                std::string(band_name(band)) + " date " + date);
    if (find(band, date))
        raise(ErrorCode::InvalidArgument, "duplicate observation for band " +
                                              std::string(band_name(band)) + " date " + date);
    observations_.push_back({band, std::move(date), std::move(raster)});
}

void SceneStack::add_mask(std::string date, std::vector<std::uint8_t> valid) {
    if (valid.size() != grid_.size())
        raise(ErrorCode::DimensionMismatch, "mask for date " + date + " does not match grid");
    if (mask_for(date)) raise(ErrorCode::InvalidArgument, "duplicate mask for date " + date);
    for (auto& v : valid) v = v ? 1 : 0;
    masks_.push_back({std::move(date), std::move(valid)});
}

const Observation* SceneStack::find(BandId band, std::string_view date) const noexcept {
    for (const auto& o : observations_)
        if (o.band == band && o.date == date) return &o;
    return nullptr;
}

const ValidityMask* SceneStack::mask_for(std::string_view date) const noexcept {
    for (const auto& m : masks_)
        if (m.date == date) return &m;
    return nullptr;
}

bool SceneStack::has_band(BandId band) const noexcept {
    return std::any_of(observations_.begin(), observations_.end(),
                       [band](const Observation& o) { return o.band == band; });
}

std::vector<std::string> SceneStack::dates() const {
    std::vector<std::string> out;
    for (const auto& o : observations_)
        if (std::find(out.begin(), out.end(), o.date) == out.end()) out.push_back(o.date);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tussock
