// Command-line front end. Uses only the C interface of libtussock.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tussock/tussock.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string stage;
    std::string message;
};

void check(tsk_status s, const std::string& stage) {
    if (s != TSK_OK) throw Failure{stage, std::string(tsk_status_name(s)) + ": " + tsk_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Scene = Handle<tsk_scene, tsk_scene_free>;
using Plots = Handle<tsk_plots, tsk_plots_free>;
using Features = Handle<tsk_features, tsk_features_free>;
using Model = Handle<tsk_model, tsk_model_free>;
using Report = Handle<tsk_report, tsk_report_free>;
using Session = Handle<tsk_session, tsk_session_free>;
using Experiment = Handle<tsk_experiment, tsk_experiment_free>;

std::string take(char* s) {
    std::string out = s ? s : "";
    tsk_string_free(s);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw Failure{"write", "cannot write " + path.string()};
}

// Model ids become file names; '*' is awkward in shells.
std::string file_stem(std::string id) {
    std::string out;
    for (char c : id) out += c == '*' ? std::string("star") : std::string(1, c);
    return out;
}

struct Common {
    int verbosity = 0;
    std::uint64_t seed = 0;
    int trees = 300;
    double split = 0.8;
    double variance = 0.999;
    int threads = 0;
    int glcm_levels = 32;
    int glcm_radius = 2;
    std::string glcm_offsets;
    std::string out = ".";
};

tsk_run_params run_params(const Common& c) {
    tsk_run_params p;
    tsk_run_params_default(&p);
    p.seed = c.seed;
    p.n_trees = c.trees;
    p.split_fraction = c.split;
    p.variance_target = c.variance;
    p.threads = c.threads;
    p.glcm_levels = c.glcm_levels;
    p.glcm_radius = c.glcm_radius;
    p.glcm_offsets = c.glcm_offsets.empty() ? nullptr : c.glcm_offsets.c_str();
    return p;
}

void log_config(const std::string& command, const std::vector<std::pair<std::string, std::string>>& items) {
    std::ostringstream line;
    line << "[config] " << command;
    for (const auto& [k, v] : items) line << ' ' << k << '=' << v;
    std::cerr << line.str() << '\n';
}

std::string str(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

std::vector<std::pair<std::string, std::string>> run_items(const Common& c) {
    return {{"seed", std::to_string(c.seed)},
            {"trees", std::to_string(c.trees)},
            {"split", str(c.split)},
            {"variance", str(c.variance)},
            {"threads", std::to_string(c.threads)},
            {"glcm_levels", std::to_string(c.glcm_levels)},
            {"glcm_radius", std::to_string(c.glcm_radius)},
            {"glcm_offsets", c.glcm_offsets.empty() ? "1,0;0,1;1,1;1,-1" : c.glcm_offsets}};
}

std::vector<std::string> registry_ids() {
    std::vector<std::string> ids;
    for (size_t i = 0; i < tsk_registry_count(); ++i) ids.emplace_back(tsk_registry_model_id(i));
    return ids;
}

void load_inputs(const std::string& scene_path, const std::string& plots_path, Scene& scene, Plots& plots) {
    check(tsk_scene_read(scene_path.c_str(), scene.out()), "read scene");
    check(tsk_plots_read(plots_path.c_str(), plots.out()), "read plots");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serrated tussock cover classification from Sentinel-2 style time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tsk_version()));
    Common c;

    auto add_verbosity = [&](CLI::App* sub) {
        sub->add_flag("-v,--verbose", c.verbosity, "Increase log detail (repeatable)");
    };
    auto add_run = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
        sub->add_option("--trees", c.trees, "Trees in the forest")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--split", c.split, "Training fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
        sub->add_option("--variance", c.variance, "PCA explained-variance target")
            ->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
    };
    auto add_glcm = [&](CLI::App* sub) {
        sub->add_option("--glcm-levels", c.glcm_levels, "Grey levels for texture")->capture_default_str();
        sub->add_option("--glcm-radius", c.glcm_radius, "Texture window radius in pixels")->capture_default_str();
        sub->add_option("--glcm-offsets", c.glcm_offsets, "Offsets as dx,dy;dx,dy;...");
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out, "Output directory")->capture_default_str(); };

    // synth
    std::string preset = "separable", profiles;
    tsk_synth_params sp;
    tsk_synth_params_default(&sp);
    auto* synth = app.add_subcommand("synth", "Generate a synthetic scene and plot file");
    synth->add_option("--preset", preset, "separable, phenology-only, mixed-realistic or degenerate")
        ->capture_default_str();
    synth->add_option("--profiles", profiles, "Profile file overriding the built-in presets");
    synth->add_option("--width", sp.width)->capture_default_str();
    synth->add_option("--height", sp.height)->capture_default_str();
    synth->add_option("--n-plots", sp.n_plots)->capture_default_str();
    synth->add_option("--dates-per-season", sp.dates_per_season)->capture_default_str();
    synth->add_option("--cloud-fraction", sp.cloud_fraction)->capture_default_str();
    synth->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
    add_out(synth);
    add_verbosity(synth);

    // composite
    std::string scene_path, plots_path;
    auto* composite = app.add_subcommand("composite", "Build seasonal and survey-period median composites");
    composite->add_option("--scene", scene_path, "STCK1 acquisition scene")->required();
    add_out(composite);
    add_verbosity(composite);

    // features
    std::vector<std::string> model_ids;
    bool all = false;
    auto* features = app.add_subcommand("features", "Assemble feature matrices for registry models");
    features->add_option("--scene", scene_path, "STCK1 scene (acquisitions or composites)")->required();
    features->add_option("--plots", plots_path, "Plot CSV")->required();
    features->add_option("--model", model_ids, "Registry model id (repeatable)");
    features->add_flag("--all", all, "Every registry model");
    add_glcm(features);
    add_out(features);
    add_verbosity(features);

    // train
    std::string features_path, model_path, predictions_path, label;
    auto* train = app.add_subcommand("train", "Split a feature matrix, fit standardizer, PCA and forest");
    train->add_option("--features", features_path, "Feature CSV (otherwise assembled from --scene/--plots/--model)");
    train->add_option("--scene", scene_path, "STCK1 scene");
    train->add_option("--plots", plots_path, "Plot CSV");
    train->add_option("--model", model_ids, "Registry model id");
    add_run(train);
    add_glcm(train);
    add_out(train);
    add_verbosity(train);

    // predict
    auto* predict = app.add_subcommand("predict", "Classify the rows of a feature matrix");
    predict->add_option("--model-file", model_path, "STCM1 model")->required();
    predict->add_option("--features", features_path, "Feature CSV")->required();
    add_out(predict);
    add_verbosity(predict);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score a predictions file");
    evaluate->add_option("--predictions", predictions_path, "Predictions CSV")->required();
    evaluate->add_option("--label", label, "Model id recorded in the report");
    add_out(evaluate);
    add_verbosity(evaluate);

    // compare
    auto* compare = app.add_subcommand("compare", "Run registry models end to end and compare them");
    compare->add_option("--scene", scene_path, "STCK1 scene")->required();
    compare->add_option("--plots", plots_path, "Plot CSV")->required();
    compare->add_option("--model", model_ids, "Registry model id (repeatable)");
    compare->add_flag("--all", all, "Every registry model");
    add_run(compare);
    add_glcm(compare);
    add_out(compare);
    add_verbosity(compare);

    CLI11_PARSE(app, argc, argv);
    tsk_set_log_level(1 + c.verbosity);

    std::string stage = "setup";
    try {
        const fs::path out(c.out);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw Failure{"setup", "cannot create output directory " + c.out + ": " + ec.message()};

        if (*synth) {
            sp.seed = c.seed;
            log_config("synth", {{"preset", preset},
                                 {"profiles", profiles.empty() ? "<built-in>" : profiles},
                                 {"width", std::to_string(sp.width)},
                                 {"height", std::to_string(sp.height)},
                                 {"n_plots", std::to_string(sp.n_plots)},
                                 {"dates_per_season", std::to_string(sp.dates_per_season)},
                                 {"cloud_fraction", str(sp.cloud_fraction)},
                                 {"seed", std::to_string(sp.seed)},
                                 {"out", c.out}});
            Scene scene;
            Plots plots;
            check(tsk_synth_generate(preset.c_str(), profiles.empty() ? nullptr : profiles.c_str(), &sp, scene.out(),
                                     plots.out()),
                  "synth");
            check(tsk_scene_write(scene.get(), (out / "scene.stck").c_str()), "write scene");
            check(tsk_plots_write(plots.get(), (out / "plots.csv").c_str()), "write plots");
            std::cout << "wrote " << (out / "scene.stck").string() << " and " << (out / "plots.csv").string() << " ("
                      << tsk_plots_count(plots.get()) << " plots)\n";
            return 0;
        }

        if (*composite) {
            log_config("composite", {{"scene", scene_path}, {"out", c.out}});
            Scene scene, comps;
            check(tsk_scene_read(scene_path.c_str(), scene.out()), "read scene");
            check(tsk_composite_build(scene.get(), comps.out()), "composite");
            check(tsk_scene_write(comps.get(), (out / "composites.stck").c_str()), "write composites");
            std::cout << "wrote " << (out / "composites.stck").string() << '\n';
            return 0;
        }

        auto select_models = [&]() {
            if (all) return registry_ids();
            if (model_ids.empty()) throw Failure{"setup", "give --model <id> or --all"};
            return model_ids;
        };

        auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
            return s;
        };

        if (*features) {
            const auto ids = select_models();
            auto items = run_items(c);
            items.insert(items.begin(), {{"scene", scene_path}, {"plots", plots_path}, {"models", join(ids)}});
            items.push_back({"out", c.out});
            log_config("features", items);
            Scene scene;
            Plots plots;
            load_inputs(scene_path, plots_path, scene, plots);
            const auto params = run_params(c);
            Session session;
            check(tsk_session_create(scene.get(), plots.get(), &params, session.out()), "features");
            for (const auto& id : ids) {
                Features f;
                check(tsk_session_features(session.get(), id.c_str(), f.out()), "features " + id);
                const fs::path path = out / ("features_" + file_stem(id) + ".csv");
                check(tsk_features_write(f.get(), path.c_str()), "write features");
                std::cout << id << ": " << tsk_features_rows(f.get()) << " rows x " << tsk_features_cols(f.get())
                          << " columns -> " << path.string() << '\n';
            }
            return 0;
        }

        if (*train) {
            const auto params = run_params(c);
            Features all_rows;
            std::string id = model_ids.empty() ? "custom" : model_ids.front();
            auto items = run_items(c);
            items.insert(items.begin(), {{"features", features_path.empty() ? "<assembled>" : features_path},
                                         {"scene", scene_path},
                                         {"plots", plots_path},
                                         {"model", id}});
            items.push_back({"out", c.out});
            log_config("train", items);
            if (!features_path.empty()) {
                check(tsk_features_read(features_path.c_str(), all_rows.out()), "read features");
            } else {
                if (scene_path.empty() || plots_path.empty() || model_ids.empty())
                    throw Failure{"setup", "give --features, or --scene, --plots and --model"};
                Scene scene;
                Plots plots;
                load_inputs(scene_path, plots_path, scene, plots);
                Session session;
                check(tsk_session_create(scene.get(), plots.get(), &params, session.out()), "features");
                check(tsk_session_features(session.get(), id.c_str(), all_rows.out()), "features " + id);
            }
            Features tr, va;
            check(tsk_features_split(all_rows.get(), c.split, c.seed, tr.out(), va.out()), "split");
            Model model;
            check(tsk_model_train(tr.get(), id.c_str(), &params, model.out()), "train");
            check(tsk_model_write(model.get(), (out / "model.stcm").c_str()), "write model");
            check(tsk_features_write(tr.get(), (out / "train.csv").c_str()), "write train");
            check(tsk_features_write(va.get(), (out / "validation.csv").c_str()), "write validation");
            std::cout << "trained " << id << " on " << tsk_features_rows(tr.get()) << " rows ("
                      << tsk_model_retained_components(model.get()) << " principal components); validation rows "
                      << tsk_features_rows(va.get()) << '\n';
            return 0;
        }

        if (*predict) {
            log_config("predict", {{"model_file", model_path}, {"features", features_path}, {"out", c.out}});
            Model model;
            Features f;
            check(tsk_model_read(model_path.c_str(), model.out()), "read model");
            check(tsk_features_read(features_path.c_str(), f.out()), "read features");
            char* csv = nullptr;
            check(tsk_model_predict(model.get(), f.get(), &csv), "predict");
            write_text(out / "predictions.csv", take(csv));
            std::cout << "wrote " << (out / "predictions.csv").string() << '\n';
            return 0;
        }

        if (*evaluate) {
            log_config("evaluate", {{"predictions", predictions_path}, {"label", label}, {"out", c.out}});
            Report report;
            check(tsk_evaluate(predictions_path.c_str(), label.c_str(), report.out()), "evaluate");
            char* json = nullptr;
            char* text = nullptr;
            check(tsk_report_json(report.get(), &json), "report");
            write_text(out / "report.json", take(json));
            check(tsk_report_text(report.get(), &text), "report");
            const std::string t = take(text);
            write_text(out / "report.txt", t);
            std::cout << t;
            return 0;
        }

        if (*compare) {
            const auto ids = select_models();
            auto items = run_items(c);
            items.insert(items.begin(), {{"scene", scene_path}, {"plots", plots_path}, {"models", join(ids)}});
            items.push_back({"out", c.out});
            log_config("compare", items);
            Scene scene;
            Plots plots;
            load_inputs(scene_path, plots_path, scene, plots);
            const auto params = run_params(c);
            Session session;
            check(tsk_session_create(scene.get(), plots.get(), &params, session.out()), "session");
            std::vector<Experiment> runs;
            for (const auto& id : ids) {
                Experiment e;
                check(tsk_session_run(session.get(), id.c_str(), e.out()), "run " + id);
                const std::string stem = file_stem(id);
                Report report;
                check(tsk_experiment_report(e.get(), report.out()), "report " + id);
                char* json = nullptr;
                char* text = nullptr;
                check(tsk_report_json(report.get(), &json), "report " + id);
                write_text(out / ("report_" + stem + ".json"), take(json));
                check(tsk_report_text(report.get(), &text), "report " + id);
                write_text(out / ("report_" + stem + ".txt"), take(text));
                check(tsk_experiment_write_model(e.get(), (out / ("model_" + stem + ".stcm")).c_str()),
                      "write model " + id);
                check(tsk_experiment_write_predictions(e.get(), (out / ("predictions_" + stem + ".csv")).c_str()),
                      "write predictions " + id);
                runs.push_back(std::move(e));
            }
            std::vector<const tsk_experiment*> handles;
            for (const auto& r : runs) handles.push_back(r.get());
            char* text = nullptr;
            char* json = nullptr;
            check(tsk_compare(handles.data(), handles.size(), &text, &json), "compare");
            const std::string t = take(text);
            write_text(out / "comparison.txt", t);
            write_text(out / "comparison.json", take(json));
            std::cout << t;
            return 0;
        }
    } catch (const Failure& f) {
        std::cerr << "error [" << f.stage << "]: " << f.message << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
