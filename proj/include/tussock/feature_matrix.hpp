#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tussock/raster.hpp"

namespace tussock {

// Plots x features table. Column names encode the source and period, e.g.
// "B8@SPRING", "ID1@WINTER", "GLCM_contrast_GREY@SURVEY".
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::vector<std::string> columns);

    std::size_t rows() const noexcept { return plot_ids_.size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::string>& plot_ids() const noexcept { return plot_ids_; }
    const std::vector<CoverClass>& labels() const noexcept { return labels_; }
    const std::vector<int>& survey_years() const noexcept { return years_; }

    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols(), cols()};
    }
    double at(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }
    std::span<const double> data() const noexcept { return values_; }

    void add_row(std::string plot_id, CoverClass label, int survey_year, std::span<const double> values);
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

    bool operator==(const FeatureMatrix&) const = default;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> plot_ids_;
    std::vector<CoverClass> labels_;
    std::vector<int> years_;
    std::vector<double> values_;
};

// CSV: plot_id,cover_class,survey_year,<feature columns...>; values printed
// with 17 significant digits so a write/read cycle is exact.
std::string encode_features_csv(const FeatureMatrix& m);
FeatureMatrix decode_features_csv(std::string_view text, std::string_view source = "<memory>");
FeatureMatrix read_features_csv(const std::filesystem::path& path);
void write_features_csv(const FeatureMatrix& m, const std::filesystem::path& path);

}  // namespace tussock
