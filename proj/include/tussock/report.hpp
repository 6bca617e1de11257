#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tussock/metrics.hpp"
#include "tussock/texture.hpp"

namespace tussock {

// Run configuration echoed into a report. Every field is optional except the
// feature list; unset fields are omitted from the serialized forms.
struct ReportConfig {
    std::vector<std::string> features;
    std::optional<std::size_t> expected_feature_count;
    std::optional<std::size_t> pc_count;
    std::optional<int> reference_pc;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_trees;
    std::optional<int> max_features;
    std::optional<double> split_fraction;
    std::optional<double> variance_target;
    std::optional<std::size_t> n_train;
    std::optional<std::size_t> n_validation;
    std::optional<std::size_t> n_dropped;
    std::map<std::string, std::size_t> train_class_counts;
    std::vector<std::string> periods;
    std::optional<TextureParams> texture;
    std::string index_table;
};

struct EvaluationReport {
    std::string model_id;
    double oa = 0.0;
    double ea = 0.0;
    double kappa = 0.0;
    std::vector<ClassMetrics> per_class;
    ConfusionMatrix confusion;
    std::vector<std::string> warnings;
    ReportConfig config;

    std::size_t feature_count() const noexcept { return config.features.size(); }
};

EvaluationReport build_report(std::string model_id, const ConfusionMatrix& cm, ReportConfig config = {});

// Full-precision JSON document (stable key order, two-space indent).
std::string report_to_json(const EvaluationReport& r);
// Human-readable summary: OA/OK line, per-class F1/P/R table, confusion
// matrix, configuration echo. OA is shown as an integer percentage.
std::string report_to_text(const EvaluationReport& r);

}  // namespace tussock
