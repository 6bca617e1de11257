/* C interface to the tussock classification library.
 *
 * Every object is an opaque handle released with its *_free function.
 * Functions return TSK_OK or an error code; tsk_last_error() then describes
 * the failure (thread-local, valid until the next call on the same thread).
 * Strings returned through char** out-parameters are owned by the caller
 * and released with tsk_string_free().
 */
#ifndef TUSSOCK_H
#define TUSSOCK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TSK_BUILDING_LIBRARY)
#    define TSK_API __declspec(dllexport)
#  else
#    define TSK_API __declspec(dllimport)
#  endif
#else
#  define TSK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsk_status {
    TSK_OK = 0,
    TSK_ERR_INVALID_ARGUMENT = 1,
    TSK_ERR_OUT_OF_BOUNDS = 2,
    TSK_ERR_PARSE = 3,
    TSK_ERR_IO = 4,
    TSK_ERR_MISSING_BAND = 5,
    TSK_ERR_CONFIGURATION = 6,
    TSK_ERR_DIMENSION_MISMATCH = 7,
    TSK_ERR_EMPTY_INPUT = 8,
    TSK_ERR_INTERNAL = 9
} tsk_status;

typedef struct tsk_scene tsk_scene;
typedef struct tsk_plots tsk_plots;
typedef struct tsk_features tsk_features;
typedef struct tsk_model tsk_model;
typedef struct tsk_report tsk_report;
typedef struct tsk_session tsk_session;
typedef struct tsk_experiment tsk_experiment;

TSK_API const char* tsk_last_error(void);
TSK_API const char* tsk_status_name(tsk_status status);
TSK_API const char* tsk_version(void);
TSK_API void tsk_string_free(char* s);
/* 0 = off, 1 = warnings (default), 2 = info, 3 = debug. */
TSK_API void tsk_set_log_level(int level);

/* Scenes (STCK1) */
TSK_API tsk_status tsk_scene_read(const char* path, tsk_scene** out);
TSK_API tsk_status tsk_scene_write(const tsk_scene* scene, const char* path);
/* JSON summary: grid, band and date lists, mask count. */
TSK_API tsk_status tsk_scene_info(const tsk_scene* scene, char** json_out);
TSK_API void tsk_scene_free(tsk_scene* scene);

/* Plots CSV */
TSK_API tsk_status tsk_plots_read(const char* path, tsk_plots** out);
TSK_API tsk_status tsk_plots_write(const tsk_plots* plots, const char* path);
TSK_API size_t tsk_plots_count(const tsk_plots* plots);
TSK_API void tsk_plots_free(tsk_plots* plots);

/* Synthetic scenes */
typedef struct tsk_synth_params {
    int width;
    int height;
    int n_plots;
    int dates_per_season;
    double cloud_fraction;
    uint64_t seed;
} tsk_synth_params;

TSK_API void tsk_synth_params_default(tsk_synth_params* params);
/* profile_path may be NULL for the built-in profiles. */
TSK_API tsk_status tsk_synth_generate(const char* preset, const char* profile_path, const tsk_synth_params* params,
                                      tsk_scene** scene_out, tsk_plots** plots_out);

/* Seasonal and survey-period median composites of every period the scene covers. */
TSK_API tsk_status tsk_composite_build(const tsk_scene* scene, tsk_scene** composites_out);

/* Model registry */
TSK_API size_t tsk_registry_count(void);
/* NULL when index is out of range. */
TSK_API const char* tsk_registry_model_id(size_t index);
TSK_API tsk_status tsk_registry_describe(char** json_out);

/* Run parameters shared by sessions and training. */
typedef struct tsk_run_params {
    uint64_t seed;
    int n_trees;
    double split_fraction;
    double variance_target;
    int threads;           /* 0: all hardware threads */
    int glcm_levels;
    int glcm_radius;
    const char* glcm_offsets; /* "dx,dy;dx,dy;..." or NULL for the default set */
} tsk_run_params;

TSK_API void tsk_run_params_default(tsk_run_params* params);

/* A session composites the scene lazily and shares the work across models. */
TSK_API tsk_status tsk_session_create(const tsk_scene* scene, const tsk_plots* plots, const tsk_run_params* params,
                                      tsk_session** out);
TSK_API tsk_status tsk_session_features(tsk_session* session, const char* model_id, tsk_features** out);
TSK_API tsk_status tsk_session_run(tsk_session* session, const char* model_id, tsk_experiment** out);
TSK_API void tsk_session_free(tsk_session* session);

/* Feature matrices (CSV) */
TSK_API tsk_status tsk_features_read(const char* path, tsk_features** out);
TSK_API tsk_status tsk_features_write(const tsk_features* features, const char* path);
TSK_API size_t tsk_features_rows(const tsk_features* features);
TSK_API size_t tsk_features_cols(const tsk_features* features);
TSK_API tsk_status tsk_features_split(const tsk_features* features, double fraction, uint64_t seed,
                                      tsk_features** train_out, tsk_features** validation_out);
TSK_API void tsk_features_free(tsk_features* features);

/* Models (STCM1) */
TSK_API tsk_status tsk_model_train(const tsk_features* train, const char* model_id, const tsk_run_params* params,
                                   tsk_model** out);
TSK_API tsk_status tsk_model_read(const char* path, tsk_model** out);
TSK_API tsk_status tsk_model_write(const tsk_model* model, const char* path);
TSK_API size_t tsk_model_retained_components(const tsk_model* model);
/* Predictions CSV: plot_id,survey_year,true_class,predicted_class,p_<class>... */
TSK_API tsk_status tsk_model_predict(const tsk_model* model, const tsk_features* features, char** csv_out);
TSK_API void tsk_model_free(tsk_model* model);

/* Reports */
TSK_API tsk_status tsk_evaluate(const char* predictions_csv, const char* model_id, tsk_report** out);
TSK_API tsk_status tsk_report_json(const tsk_report* report, char** out);
TSK_API tsk_status tsk_report_text(const tsk_report* report, char** out);
TSK_API double tsk_report_oa(const tsk_report* report);
TSK_API double tsk_report_kappa(const tsk_report* report);
TSK_API size_t tsk_report_feature_count(const tsk_report* report);
TSK_API void tsk_report_free(tsk_report* report);

/* Experiments */
TSK_API tsk_status tsk_experiment_report(const tsk_experiment* experiment, tsk_report** out);
TSK_API size_t tsk_experiment_retained_components(const tsk_experiment* experiment);
TSK_API tsk_status tsk_experiment_write_model(const tsk_experiment* experiment, const char* path);
TSK_API tsk_status tsk_experiment_write_predictions(const tsk_experiment* experiment, const char* path);
TSK_API void tsk_experiment_free(tsk_experiment* experiment);

/* Comparison table over experiments, sorted by OA then OK, with the
 * published reference rows appended. Either output may be NULL. */
TSK_API tsk_status tsk_compare(const tsk_experiment* const* experiments, size_t count, char** text_out,
                               char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* TUSSOCK_H */
