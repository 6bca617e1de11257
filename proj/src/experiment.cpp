#include "tussock/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "tussock/errors.hpp"
#include "tussock/log.hpp"

namespace tussock {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
auto in_stage(const char* stage, const std::string& model_id, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        raise(e.code(), std::string(stage) + " (model " + model_id + "): " + e.what());
    } catch (const std::exception& e) {
        raise(ErrorCode::Internal, std::string(stage) + " (model " + model_id + "): " + e.what());
    }
}

std::string pct(double v) { return std::to_string(static_cast<int>(std::lround(v * 100.0))) + "%"; }

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

ExperimentResult run_experiment_on(const ModelConfig& config, const FeatureMatrix& features,
                                   const ExperimentParams& params, std::size_t n_dropped,
                                   const TextureParams* texture) {
    ExperimentResult res;
    res.seed = params.seed;
    const auto split = in_stage("split", config.id, [&] {
        if (features.rows() < 2) raise(ErrorCode::EmptyInput, "fewer than two usable plots");
        return split_train_validation(features.rows(), params.split_fraction, params.seed);
    });
    res.train = features.select_rows(split.train);
    res.validation = features.select_rows(split.validation);

    auto t0 = Clock::now();
    res.model = in_stage("fit", config.id, [&] {
        FitParams fp;
        fp.forest.n_trees = params.n_trees;
        fp.forest.seed = params.seed;
        fp.forest.threads = params.threads;
        fp.variance_target = params.variance_target;
        return fit_model(config.id, res.train, fp);
    });
    res.timings.fit_s = seconds_since(t0);
    res.retained_pcs = res.model.pca.retained;

    t0 = Clock::now();
    res.predictions = in_stage("predict", config.id, [&] { return predict(res.model, res.validation); });
    res.timings.predict_s = seconds_since(t0);

    res.report = in_stage("evaluate", config.id, [&] {
        std::vector<std::string> truth, predicted;
        for (const auto& p : res.predictions) {
            truth.push_back(p.true_class);
            predicted.push_back(p.predicted_class);
        }
        const auto cm = confusion(truth, predicted, res.model.classes);
        ReportConfig rc;
        rc.features = features.columns();
        rc.expected_feature_count = config.expected_feature_count;
        rc.pc_count = res.retained_pcs;
        rc.reference_pc = config.published.pc;
        rc.seed = params.seed;
        rc.n_trees = params.n_trees;
        rc.max_features = res.model.forest.max_features;
        rc.split_fraction = params.split_fraction;
        rc.variance_target = params.variance_target;
        rc.n_train = res.train.rows();
        rc.n_validation = res.validation.rows();
        rc.n_dropped = n_dropped;
        for (CoverClass c : res.train.labels()) ++rc.train_class_counts[std::string(cover_class_name(c))];
        for (const auto& slot : config.periods) rc.periods.emplace_back(slot.name());
        if (texture && config.uses_texture()) rc.texture = *texture;
        if (!config.indices.empty()) {
            std::string table;
            const auto& reg = IndexRegistry::builtin();
            for (const auto& id : config.indices) {
                const auto& def = reg.find(id);
                table += def.id + " " + def.name + ": " +
                         (def.kind == IndexDefinition::Kind::NeighborhoodStddev
                              ? "stddev_r" + std::to_string(def.window_radius) + "(" + def.source_id + ")"
                              : def.formula()) +
                         "\n";
            }
            rc.index_table = table;
        }
        return build_report(config.id, cm, std::move(rc));
    });
    logger()->info("model {}: OA {:.4f} OK {:.4f} ({} features, {} PCs, fit {:.2f}s)", config.id,
                   res.report.oa, res.report.kappa, features.cols(), res.retained_pcs, res.timings.fit_s);
    return res;
}

ExperimentResult run_experiment(const ModelConfig& config, FeatureExtractor& features,
                                std::span<const PlotObservation> plots, const ExperimentParams& params) {
    const auto t0 = Clock::now();
    std::size_t dropped = 0;
    const FeatureMatrix x = in_stage("assemble", config.id, [&] { return features.assemble(config, plots, &dropped); });
    const double assemble_s = seconds_since(t0);
    auto res = run_experiment_on(config, x, params, dropped, &features.texture_params());
    res.timings.assemble_s = assemble_s;
    return res;
}

ExperimentResult run_experiment(const ModelConfig& config, const SceneStack& scene,
                                std::span<const PlotObservation> plots, const ExperimentParams& params,
                                const TextureParams& texture) {
    FeatureExtractor fx(scene, texture);
    return run_experiment(config, fx, plots, params);
}

ComparisonTable compare_models(std::span<const ExperimentResult> results, const ModelRegistry& registry) {
    ComparisonTable t;
    for (const auto& r : results) {
        ComparisonRow row;
        row.model_id = r.report.model_id;
        row.oa = r.report.oa;
        row.kappa = r.report.kappa;
        row.features = r.report.feature_count();
        row.retained_pcs = r.retained_pcs;
        row.per_class = r.report.per_class;
        for (const auto& m : registry.models())
            if (m.id == row.model_id) row.published = m.published;
        t.rows.push_back(std::move(row));
    }
    std::sort(t.rows.begin(), t.rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.oa != b.oa) return a.oa > b.oa;
        if (a.kappa != b.kappa) return a.kappa > b.kappa;
        return a.model_id < b.model_id;
    });
    t.references = registry.reference_rows();
    return t;
}

std::string comparison_to_text(const ComparisonTable& t) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-30s %6s %6s %9s %5s %13s %13s\n", "model", "OA", "OK", "features", "PCs",
                  "published OA", "published OK");
    out << line;
    for (const auto& r : t.rows) {
        std::snprintf(line, sizeof line, "%-30s %6s %6s %9zu %5zu %13s %13s\n", r.model_id.c_str(), pct(r.oa).c_str(),
                      fmt2(r.kappa).c_str(), r.features, r.retained_pcs,
                      r.published.oa ? pct(*r.published.oa).c_str() : "-",
                      r.published.kappa ? fmt2(*r.published.kappa).c_str() : "-");
        out << line;
    }
    for (const auto& ref : t.references) {
        std::snprintf(line, sizeof line, "%-30s %6s %6s %9s %5s\n", ref.label.c_str(), pct(ref.oa).c_str(),
                      fmt2(ref.kappa).c_str(), "-", "-");
        out << line;
    }
    if (!t.rows.empty() && !t.rows.front().per_class.empty()) {
        out << "\nper-class F1 / P / R\n";
        std::snprintf(line, sizeof line, "%-8s", "model");
        out << line;
        for (const auto& c : t.rows.front().per_class) {
            std::snprintf(line, sizeof line, " %18s", c.name.c_str());
            out << line;
        }
        out << '\n';
        for (const auto& r : t.rows) {
            std::snprintf(line, sizeof line, "%-8s", r.model_id.c_str());
            out << line;
            for (const auto& c : r.per_class) {
                std::snprintf(line, sizeof line, "   %.2f / %.2f / %.2f", c.f1, c.precision, c.recall);
                out << line;
            }
            out << '\n';
        }
    }
    return out.str();
}

std::string comparison_to_json(const ComparisonTable& t) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = "tussock-comparison";
    j["version"] = 1;
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) {
        ordered_json row;
        row["model_id"] = r.model_id;
        row["overall_accuracy"] = r.oa;
        row["kappa"] = r.kappa;
        row["feature_count"] = r.features;
        row["pc_count"] = r.retained_pcs;
        ordered_json classes = ordered_json::array();
        for (const auto& c : r.per_class)
            classes.push_back({{"class", c.name}, {"f1", c.f1}, {"precision", c.precision}, {"recall", c.recall}});
        row["per_class"] = classes;
        ordered_json pub = ordered_json::object();
        if (r.published.oa) pub["oa"] = *r.published.oa;
        if (r.published.kappa) pub["kappa"] = *r.published.kappa;
        if (r.published.pc) pub["pc"] = *r.published.pc;
        row["published"] = pub;
        rows.push_back(row);
    }
    j["models"] = rows;
    ordered_json refs = ordered_json::array();
    for (const auto& r : t.references)
        refs.push_back({{"label", r.label}, {"overall_accuracy", r.oa}, {"kappa", r.kappa}, {"source", "published"}});
    j["published_reference_rows"] = refs;
    return j.dump(2) + "\n";
}

}  // namespace tussock
