#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tussock/feature_matrix.hpp"
#include "tussock/forest.hpp"
#include "tussock/reduce.hpp"

namespace tussock {

// A trained classifier: training-set standardizer, PCA fitted on the
// standardized training rows, and the forest over the retained components.
struct ModelArtifact {
    std::string model_id;
    std::vector<std::string> classes;
    Standardizer standardizer;
    PcaModel pca;
    ForestModel forest;

    const std::vector<std::string>& columns() const noexcept { return standardizer.columns; }
    bool operator==(const ModelArtifact&) const = default;
};

struct FitParams {
    ForestParams forest;
    double variance_target = kDefaultVarianceTarget;
};

ModelArtifact fit_model(std::string model_id, const FeatureMatrix& train, const FitParams& params);

// Columns of x must match the artifact's columns by name and order.
std::vector<std::vector<double>> predict_proba(const ModelArtifact& m, const FeatureMatrix& x);
std::vector<int> predict_classes(const ModelArtifact& m, const FeatureMatrix& x);

// STCM1: one line of JSON header (identity, columns, dimensions, forest
// parameters, per-tree node and leaf counts), then a little-endian payload:
// standardizer mean and scale, PCA mean, components, eigenvalues and ratios
// (f64), and per tree its nodes (i32 feature, f64 threshold, i32 left,
// i32 right) followed by its leaf class counts (u32).
std::string encode_model(const ModelArtifact& m);
ModelArtifact decode_model(std::string_view bytes, std::string_view source = "<memory>");
ModelArtifact read_model(const std::filesystem::path& path);
void write_model(const ModelArtifact& m, const std::filesystem::path& path);

struct Prediction {
    std::string plot_id;
    int survey_year = 0;
    std::string true_class;  // empty when unknown
    std::string predicted_class;
    std::vector<double> proba;
};

// plot_id,survey_year,true_class,predicted_class,p_<class>...
std::string encode_predictions_csv(const std::vector<Prediction>& rows, const std::vector<std::string>& classes);
std::vector<Prediction> decode_predictions_csv(std::string_view text, std::string_view source = "<memory>");

std::vector<Prediction> predict(const ModelArtifact& m, const FeatureMatrix& x);

}  // namespace tussock
