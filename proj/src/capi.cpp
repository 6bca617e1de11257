#include "tussock/tussock.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tussock/compositing.hpp"
#include "tussock/errors.hpp"
#include "tussock/experiment.hpp"
#include "tussock/log.hpp"
#include "tussock/model_io.hpp"
#include "tussock/registry.hpp"
#include "tussock/scene_io.hpp"
#include "tussock/synth.hpp"

using namespace tussock;

struct tsk_scene {
    std::shared_ptr<const SceneStack> stack;
};
struct tsk_plots {
    std::vector<PlotObservation> plots;
};
struct tsk_features {
    FeatureMatrix matrix;
};
struct tsk_model {
    ModelArtifact artifact;
};
struct tsk_report {
    EvaluationReport report;
};
struct tsk_session {
    std::shared_ptr<const SceneStack> stack;
    std::vector<PlotObservation> plots;
    ExperimentParams params;
    std::unique_ptr<FeatureExtractor> extractor;
};
struct tsk_experiment {
    ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

tsk_status to_status(ErrorCode c) {
    switch (c) {
    case ErrorCode::InvalidArgument: return TSK_ERR_INVALID_ARGUMENT;
    case ErrorCode::OutOfBounds: return TSK_ERR_OUT_OF_BOUNDS;
    case ErrorCode::Parse: return TSK_ERR_PARSE;
    case ErrorCode::Io: return TSK_ERR_IO;
    case ErrorCode::MissingBand: return TSK_ERR_MISSING_BAND;
    case ErrorCode::Configuration: return TSK_ERR_CONFIGURATION;
    case ErrorCode::DimensionMismatch: return TSK_ERR_DIMENSION_MISMATCH;
    case ErrorCode::EmptyInput: return TSK_ERR_EMPTY_INPUT;
    case ErrorCode::Internal: return TSK_ERR_INTERNAL;
    }
    return TSK_ERR_INTERNAL;
}

template <typename F>
tsk_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return TSK_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TSK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TSK_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) raise(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

std::vector<Offset> parse_offsets(const char* text) {
    std::vector<Offset> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        Offset o;
        char comma = 0;
        std::istringstream is(item);
        if (!(is >> o.dx >> comma >> o.dy) || comma != ',' || !(is >> std::ws).eof())
            raise(ErrorCode::InvalidArgument, "bad GLCM offset '" + item + "' (expected dx,dy)");
        if (o.dx == 0 && o.dy == 0) raise(ErrorCode::InvalidArgument, "GLCM offset 0,0 is not allowed");
        out.push_back(o);
    }
    if (out.empty()) raise(ErrorCode::InvalidArgument, "no GLCM offsets given");
    return out;
}

TextureParams texture_from(const tsk_run_params& p) {
    TextureParams t;
    t.levels = p.glcm_levels;
    t.window_radius = p.glcm_radius;
    if (p.glcm_offsets) t.offsets = parse_offsets(p.glcm_offsets);
    if (t.levels < 2) raise(ErrorCode::InvalidArgument, "GLCM levels must be at least 2");
    if (t.window_radius < 1) raise(ErrorCode::InvalidArgument, "GLCM radius must be at least 1");
    return t;
}

tsk_run_params defaults() {
    tsk_run_params p;
    tsk_run_params_default(&p);
    return p;
}

}  // namespace

extern "C" {

const char* tsk_last_error(void) { return g_last_error.c_str(); }

const char* tsk_status_name(tsk_status status) {
    switch (status) {
    case TSK_OK: return "ok";
    case TSK_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TSK_ERR_OUT_OF_BOUNDS: return "out of bounds";
    case TSK_ERR_PARSE: return "parse error";
    case TSK_ERR_IO: return "I/O error";
    case TSK_ERR_MISSING_BAND: return "missing band";
    case TSK_ERR_CONFIGURATION: return "configuration error";
    case TSK_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case TSK_ERR_EMPTY_INPUT: return "empty input";
    case TSK_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* tsk_version(void) { return "1.0.0"; }

void tsk_string_free(char* s) { std::free(s); }

void tsk_set_log_level(int level) { set_log_verbosity(level); }

tsk_status tsk_scene_read(const char* path, tsk_scene** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new tsk_scene{std::make_shared<const SceneStack>(read_scene(path))};
    });
}

tsk_status tsk_scene_write(const tsk_scene* scene, const char* path) {
    return guarded([&] {
        require(scene, "scene");
        require(path, "path");
        write_scene(*scene->stack, path);
    });
}

tsk_status tsk_scene_info(const tsk_scene* scene, char** json_out) {
    return guarded([&] {
        require(scene, "scene");
        require(json_out, "json_out");
        const auto& s = *scene->stack;
        nlohmann::ordered_json j;
        j["width"] = s.grid().width;
        j["height"] = s.grid().height;
        j["origin_x"] = s.grid().origin_x;
        j["origin_y"] = s.grid().origin_y;
        j["pixel_size"] = s.grid().pixel_size;
        j["nodata"] = s.nodata();
        std::vector<std::string> bands;
        for (BandId b : kInputBands)
            if (s.has_band(b)) bands.emplace_back(band_name(b));
        j["bands"] = bands;
        j["dates"] = s.dates();
        j["observations"] = s.observations().size();
        j["masks"] = s.masks().size();
        j["composite"] = is_composite_scene(s);
        *json_out = dup_string(j.dump(2) + "\n");
    });
}

void tsk_scene_free(tsk_scene* scene) { delete scene; }

tsk_status tsk_plots_read(const char* path, tsk_plots** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new tsk_plots{read_plots(path)};
    });
}

tsk_status tsk_plots_write(const tsk_plots* plots, const char* path) {
    return guarded([&] {
        require(plots, "plots");
        require(path, "path");
        write_plots(plots->plots, path);
    });
}

size_t tsk_plots_count(const tsk_plots* plots) { return plots ? plots->plots.size() : 0; }

void tsk_plots_free(tsk_plots* plots) { delete plots; }

void tsk_synth_params_default(tsk_synth_params* params) {
    if (!params) return;
    const SynthParams d;
    params->width = d.width;
    params->height = d.height;
    params->n_plots = static_cast<int>(d.n_plots);
    params->dates_per_season = d.dates_per_season;
    params->cloud_fraction = d.cloud_fraction;
    params->seed = d.seed;
}

tsk_status tsk_synth_generate(const char* preset, const char* profile_path, const tsk_synth_params* params,
                              tsk_scene** scene_out, tsk_plots** plots_out) {
    return guarded([&] {
        require(preset, "preset");
        require(params, "params");
        require(scene_out, "scene_out");
        require(plots_out, "plots_out");
        if (params->n_plots <= 0) raise(ErrorCode::InvalidArgument, "n_plots must be positive");
        PhenologyProfile profile;
        if (profile_path) {
            const auto all = load_profiles(read_file(profile_path));
            auto it = all.find(preset);
            if (it == all.end())
                raise(ErrorCode::Configuration, "preset '" + std::string(preset) + "' not found in " + profile_path);
            profile = it->second;
        } else {
            profile = builtin_profile(preset);
        }
        SynthParams sp;
        sp.width = params->width;
        sp.height = params->height;
        sp.n_plots = static_cast<std::size_t>(params->n_plots);
        sp.dates_per_season = params->dates_per_season;
        sp.cloud_fraction = params->cloud_fraction;
        sp.seed = params->seed;
        auto generated = generate_scene(profile, sp);
        auto scene = std::make_unique<tsk_scene>(tsk_scene{std::make_shared<const SceneStack>(std::move(generated.scene))});
        *plots_out = new tsk_plots{std::move(generated.plots)};
        *scene_out = scene.release();
    });
}

tsk_status tsk_composite_build(const tsk_scene* scene, tsk_scene** composites_out) {
    return guarded([&] {
        require(scene, "scene");
        require(composites_out, "composites_out");
        const auto& s = *scene->stack;
        if (is_composite_scene(s)) raise(ErrorCode::InvalidArgument, "scene already holds composites");
        std::vector<BandId> bands;
        for (BandId b : kInputBands)
            if (s.has_band(b)) bands.push_back(b);
        const auto periods = periods_covered(s);
        if (periods.empty()) raise(ErrorCode::EmptyInput, "scene has no dated acquisitions");
        *composites_out =
            new tsk_scene{std::make_shared<const SceneStack>(composites_to_scene(build_composites(s, periods, bands)))};
    });
}

size_t tsk_registry_count(void) {
    try {
        return ModelRegistry::builtin().models().size();
    } catch (...) {
        return 0;
    }
}

const char* tsk_registry_model_id(size_t index) {
    try {
        const auto& models = ModelRegistry::builtin().models();
        return index < models.size() ? models[index].id.c_str() : nullptr;
    } catch (...) {
        return nullptr;
    }
}

tsk_status tsk_registry_describe(char** json_out) {
    return guarded([&] {
        require(json_out, "json_out");
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& m : ModelRegistry::builtin().models())
            j.push_back({{"id", m.id},
                         {"description", m.description},
                         {"feature_count", m.expected_feature_count},
                         {"columns", m.column_names()}});
        *json_out = dup_string(j.dump(2) + "\n");
    });
}

void tsk_run_params_default(tsk_run_params* params) {
    if (!params) return;
    const ExperimentParams e;
    const TextureParams t;
    params->seed = e.seed;
    params->n_trees = e.n_trees;
    params->split_fraction = e.split_fraction;
    params->variance_target = e.variance_target;
    params->threads = e.threads;
    params->glcm_levels = t.levels;
    params->glcm_radius = t.window_radius;
    params->glcm_offsets = nullptr;
}

tsk_status tsk_session_create(const tsk_scene* scene, const tsk_plots* plots, const tsk_run_params* params,
                              tsk_session** out) {
    return guarded([&] {
        require(scene, "scene");
        require(plots, "plots");
        require(out, "out");
        const tsk_run_params p = params ? *params : defaults();
        auto s = std::make_unique<tsk_session>();
        s->stack = scene->stack;
        s->plots = plots->plots;
        s->params.seed = p.seed;
        s->params.n_trees = p.n_trees;
        s->params.split_fraction = p.split_fraction;
        s->params.variance_target = p.variance_target;
        s->params.threads = p.threads;
        s->extractor = std::make_unique<FeatureExtractor>(*s->stack, texture_from(p));
        *out = s.release();
    });
}

tsk_status tsk_session_features(tsk_session* session, const char* model_id, tsk_features** out) {
    return guarded([&] {
        require(session, "session");
        require(model_id, "model_id");
        require(out, "out");
        const auto& config = ModelRegistry::builtin().find(model_id);
        *out = new tsk_features{session->extractor->assemble(config, session->plots)};
    });
}

tsk_status tsk_session_run(tsk_session* session, const char* model_id, tsk_experiment** out) {
    return guarded([&] {
        require(session, "session");
        require(model_id, "model_id");
        require(out, "out");
        const auto& config = ModelRegistry::builtin().find(model_id);
        *out = new tsk_experiment{run_experiment(config, *session->extractor, session->plots, session->params)};
    });
}

void tsk_session_free(tsk_session* session) { delete session; }

tsk_status tsk_features_read(const char* path, tsk_features** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new tsk_features{read_features_csv(path)};
    });
}

tsk_status tsk_features_write(const tsk_features* features, const char* path) {
    return guarded([&] {
        require(features, "features");
        require(path, "path");
        write_features_csv(features->matrix, path);
    });
}

size_t tsk_features_rows(const tsk_features* features) { return features ? features->matrix.rows() : 0; }

size_t tsk_features_cols(const tsk_features* features) { return features ? features->matrix.cols() : 0; }

tsk_status tsk_features_split(const tsk_features* features, double fraction, uint64_t seed,
                              tsk_features** train_out, tsk_features** validation_out) {
    return guarded([&] {
        require(features, "features");
        require(train_out, "train_out");
        require(validation_out, "validation_out");
        const auto split = split_train_validation(features->matrix.rows(), fraction, seed);
        auto train = std::make_unique<tsk_features>(tsk_features{features->matrix.select_rows(split.train)});
        *validation_out = new tsk_features{features->matrix.select_rows(split.validation)};
        *train_out = train.release();
    });
}

void tsk_features_free(tsk_features* features) { delete features; }

tsk_status tsk_model_train(const tsk_features* train, const char* model_id, const tsk_run_params* params,
                           tsk_model** out) {
    return guarded([&] {
        require(train, "train");
        require(model_id, "model_id");
        require(out, "out");
        const tsk_run_params p = params ? *params : defaults();
        FitParams fp;
        fp.forest.n_trees = p.n_trees;
        fp.forest.seed = p.seed;
        fp.forest.threads = p.threads;
        fp.variance_target = p.variance_target;
        *out = new tsk_model{fit_model(model_id, train->matrix, fp)};
    });
}

tsk_status tsk_model_read(const char* path, tsk_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new tsk_model{read_model(path)};
    });
}

tsk_status tsk_model_write(const tsk_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        write_model(model->artifact, path);
    });
}

size_t tsk_model_retained_components(const tsk_model* model) { return model ? model->artifact.pca.retained : 0; }

tsk_status tsk_model_predict(const tsk_model* model, const tsk_features* features, char** csv_out) {
    return guarded([&] {
        require(model, "model");
        require(features, "features");
        require(csv_out, "csv_out");
        *csv_out = dup_string(
            encode_predictions_csv(predict(model->artifact, features->matrix), model->artifact.classes));
    });
}

void tsk_model_free(tsk_model* model) { delete model; }

tsk_status tsk_evaluate(const char* predictions_csv, const char* model_id, tsk_report** out) {
    return guarded([&] {
        require(predictions_csv, "predictions_csv");
        require(out, "out");
        const auto rows = decode_predictions_csv(read_file(predictions_csv), predictions_csv);
        std::vector<std::string> truth, predicted, classes;
        for (CoverClass c : kCoverClasses) classes.emplace_back(cover_class_name(c));
        for (const auto& r : rows) {
            if (r.true_class.empty())
                raise(ErrorCode::InvalidArgument, "plot " + r.plot_id + " has no true class to evaluate against");
            truth.push_back(r.true_class);
            predicted.push_back(r.predicted_class);
        }
        if (rows.empty()) raise(ErrorCode::EmptyInput, "predictions file has no rows");
        *out = new tsk_report{build_report(model_id ? model_id : "", confusion(truth, predicted, classes))};
    });
}

tsk_status tsk_report_json(const tsk_report* report, char** out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        *out = dup_string(report_to_json(report->report));
    });
}

tsk_status tsk_report_text(const tsk_report* report, char** out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        *out = dup_string(report_to_text(report->report));
    });
}

double tsk_report_oa(const tsk_report* report) { return report ? report->report.oa : 0.0; }

double tsk_report_kappa(const tsk_report* report) { return report ? report->report.kappa : 0.0; }

size_t tsk_report_feature_count(const tsk_report* report) { return report ? report->report.feature_count() : 0; }

void tsk_report_free(tsk_report* report) { delete report; }

tsk_status tsk_experiment_report(const tsk_experiment* experiment, tsk_report** out) {
    return guarded([&] {
        require(experiment, "experiment");
        require(out, "out");
        *out = new tsk_report{experiment->result.report};
    });
}

size_t tsk_experiment_retained_components(const tsk_experiment* experiment) {
    return experiment ? experiment->result.retained_pcs : 0;
}

tsk_status tsk_experiment_write_model(const tsk_experiment* experiment, const char* path) {
    return guarded([&] {
        require(experiment, "experiment");
        require(path, "path");
        write_model(experiment->result.model, path);
    });
}

tsk_status tsk_experiment_write_predictions(const tsk_experiment* experiment, const char* path) {
    return guarded([&] {
        require(experiment, "experiment");
        require(path, "path");
        write_file(path, encode_predictions_csv(experiment->result.predictions, experiment->result.model.classes));
    });
}

void tsk_experiment_free(tsk_experiment* experiment) { delete experiment; }

tsk_status tsk_compare(const tsk_experiment* const* experiments, size_t count, char** text_out, char** json_out) {
    return guarded([&] {
        require(experiments, "experiments");
        if (count == 0) raise(ErrorCode::EmptyInput, "nothing to compare");
        std::vector<ExperimentResult> results;
        results.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            require(experiments[i], "experiment");
            results.push_back(experiments[i]->result);
        }
        const auto table = compare_models(results);
        std::unique_ptr<char, decltype(&std::free)> text(text_out ? dup_string(comparison_to_text(table)) : nullptr,
                                                         &std::free);
        if (json_out) *json_out = dup_string(comparison_to_json(table));
        if (text_out) *text_out = text.release();
    });
}

}  // extern "C"
