#include "tussock/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace tussock {

namespace {

using nlohmann::ordered_json;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string percent(double v) { return std::to_string(static_cast<int>(std::lround(v * 100.0))) + "%"; }

ordered_json config_json(const ReportConfig& c) {
    ordered_json j;
    j["feature_count"] = c.features.size();
    if (c.expected_feature_count) j["expected_feature_count"] = *c.expected_feature_count;
    if (c.pc_count) j["pc_count"] = *c.pc_count;
    if (c.reference_pc) j["reference_pc_published"] = *c.reference_pc;
    if (c.seed) j["seed"] = *c.seed;
    if (c.n_trees) j["n_trees"] = *c.n_trees;
    if (c.max_features) j["max_features"] = *c.max_features;
    if (c.split_fraction) j["split_fraction"] = *c.split_fraction;
    if (c.variance_target) j["variance_target"] = *c.variance_target;
    if (c.n_train) j["n_train"] = *c.n_train;
    if (c.n_validation) j["n_validation"] = *c.n_validation;
    if (c.n_dropped) j["n_dropped"] = *c.n_dropped;
    if (!c.train_class_counts.empty()) j["train_class_counts"] = c.train_class_counts;
    if (!c.periods.empty()) j["periods"] = c.periods;
    if (c.texture) {
        ordered_json offsets = ordered_json::array();
        for (const auto& o : c.texture->offsets) offsets.push_back({o.dx, o.dy});
        j["texture"] = {{"levels", c.texture->levels},
                        {"window_radius", c.texture->window_radius},
                        {"offsets", offsets}};
    }
    j["features"] = c.features;
    if (!c.index_table.empty()) j["index_registry"] = c.index_table;
    return j;
}

}  // namespace

EvaluationReport build_report(std::string model_id, const ConfusionMatrix& cm, ReportConfig config) {
    EvaluationReport r;
    r.model_id = std::move(model_id);
    r.confusion = cm;
    r.oa = overall_accuracy(cm);
    r.ea = expected_accuracy(cm);
    r.kappa = kappa(cm);
    for (std::size_t i = 0; i < cm.size(); ++i) {
        r.per_class.push_back(per_class_prf(cm, i));
        if (r.per_class.back().zero_division)
            r.warnings.push_back("class " + cm.classes()[i] +
                                 ": zero denominator in precision or recall, metric reported as 0");
    }
    if (r.ea == 1.0) r.warnings.push_back("expected accuracy is 1; kappa set by convention");
    r.config = std::move(config);
    return r;
}

std::string report_to_json(const EvaluationReport& r) {
    ordered_json j;
    j["format"] = "tussock-report";
    j["version"] = 1;
    j["model_id"] = r.model_id;
    j["overall_accuracy"] = r.oa;
    j["expected_accuracy"] = r.ea;
    j["kappa"] = r.kappa;
    j["kappa_definition"] = "Cohen's kappa; expected accuracy from confusion-matrix marginal products";
    ordered_json classes = ordered_json::array();
    for (const auto& m : r.per_class)
        classes.push_back({{"class", m.name},
                           {"f1", m.f1},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"support", m.support},
                           {"predicted", m.predicted}});
    j["per_class"] = classes;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < r.confusion.size(); ++k) row.push_back(r.confusion.count(i, k));
        rows.push_back(row);
    }
    j["confusion"] = {{"classes", r.confusion.classes()}, {"rows_true_cols_predicted", rows}};
    j["warnings"] = r.warnings;
    j["config"] = config_json(r.config);
    return j.dump(2) + "\n";
}

std::string report_to_text(const EvaluationReport& r) {
    std::ostringstream out;
    out << "Model " << r.model_id << "\n";
    out << "  OA " << percent(r.oa) << " (" << fixed(r.oa, 4) << ")   EA " << fixed(r.ea, 4)
        << "   OK " << fixed(r.kappa, 2) << "\n\n";
    out << "  class     F1    P     R     support\n";
    for (const auto& m : r.per_class) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-8s  %.2f  %.2f  %.2f  %llu\n", m.name.c_str(), m.f1,
                      m.precision, m.recall, static_cast<unsigned long long>(m.support));
        out << line;
    }
    out << "\n  confusion (rows = true, columns = predicted)\n  " << std::string(8, ' ');
    for (const auto& c : r.confusion.classes()) {
        char cell[32];
        std::snprintf(cell, sizeof cell, "%8s", c.c_str());
        out << cell;
    }
    out << "\n";
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
        char head[32];
        std::snprintf(head, sizeof head, "  %-8s", r.confusion.classes()[i].c_str());
        out << head;
        for (std::size_t k = 0; k < r.confusion.size(); ++k) {
            char cell[32];
            std::snprintf(cell, sizeof cell, "%8llu", static_cast<unsigned long long>(r.confusion.count(i, k)));
            out << cell;
        }
        out << "\n";
    }
    const auto& c = r.config;
    out << "\n  features " << c.features.size();
    if (c.expected_feature_count) out << " (expected " << *c.expected_feature_count << ")";
    if (c.pc_count) out << ", principal components " << *c.pc_count;
    if (c.reference_pc) out << " (published " << *c.reference_pc << ")";
    if (c.seed) out << ", seed " << *c.seed;
    if (c.n_trees) out << ", trees " << *c.n_trees;
    if (c.n_train && c.n_validation) out << ", train/validation " << *c.n_train << "/" << *c.n_validation;
    if (c.n_dropped) out << ", dropped " << *c.n_dropped;
    out << "\n";
    for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
    return out.str();
}

}  // namespace tussock
