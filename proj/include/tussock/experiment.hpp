#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tussock/feature_matrix.hpp"
#include "tussock/model_io.hpp"
#include "tussock/registry.hpp"
#include "tussock/report.hpp"

namespace tussock {

struct ExperimentParams {
    double split_fraction = 0.8;
    std::uint64_t seed = 0;
    int n_trees = 300;
    double variance_target = kDefaultVarianceTarget;
    int threads = 0;
};

struct StageTimings {
    double assemble_s = 0.0;
    double fit_s = 0.0;
    double predict_s = 0.0;
};

struct ExperimentResult {
    EvaluationReport report;
    std::size_t retained_pcs = 0;
    std::uint64_t seed = 0;
    StageTimings timings;  // never serialized
    ModelArtifact model;
    FeatureMatrix train;
    FeatureMatrix validation;
    std::vector<Prediction> predictions;
};

// assemble -> split -> standardize (train) -> PCA (train) -> forest (train)
// -> predict (validation) -> report. Failures name the stage.
ExperimentResult run_experiment(const ModelConfig& config, FeatureExtractor& features,
                                std::span<const PlotObservation> plots, const ExperimentParams& params);
ExperimentResult run_experiment(const ModelConfig& config, const SceneStack& scene,
                                std::span<const PlotObservation> plots, const ExperimentParams& params,
                                const TextureParams& texture = {});

// Split, fit and evaluate an already assembled matrix.
ExperimentResult run_experiment_on(const ModelConfig& config, const FeatureMatrix& features,
                                   const ExperimentParams& params, std::size_t n_dropped = 0,
                                   const TextureParams* texture = nullptr);

struct ComparisonRow {
    std::string model_id;
    double oa = 0.0;
    double kappa = 0.0;
    std::size_t features = 0;
    std::size_t retained_pcs = 0;
    std::vector<ClassMetrics> per_class;
    PublishedScores published;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;  // OA desc, then OK desc, then id
    std::vector<ReferenceRow> references;
};

ComparisonTable compare_models(std::span<const ExperimentResult> results,
                               const ModelRegistry& registry = ModelRegistry::builtin());
std::string comparison_to_text(const ComparisonTable& t);
std::string comparison_to_json(const ComparisonTable& t);

}  // namespace tussock
