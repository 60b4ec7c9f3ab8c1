#ifndef DENTSYNTH_H
#define DENTSYNTH_H

/*
 * C interface to the dentsynth library. Objects are opaque handles released
 * with the matching *_free function. Every call returns a ds_status; on
 * failure ds_last_error() describes the problem (thread-local, valid until
 * the next failing call on the same thread). Strings returned through char**
 * are owned by the caller and released with ds_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(DENTSYNTH_BUILDING)
#define DS_API __attribute__((visibility("default")))
#else
#define DS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ds_status {
  DS_OK = 0,
  DS_ERR_PARAMETER = 1,
  DS_ERR_PARSE = 2,
  DS_ERR_SHAPE = 3,
  DS_ERR_GEOMETRY = 4,
  DS_ERR_LOOKUP = 5,
  DS_ERR_CONFIGURATION = 6,
  DS_ERR_IMAGE = 7,
  DS_ERR_IO = 8,
  DS_ERR_DATA = 9,
  DS_ERR_NULL_ARGUMENT = 10,
  DS_ERR_INTERNAL = 11
} ds_status;

typedef enum ds_background_mode { DS_BACKGROUND_BLACK = 0, DS_BACKGROUND_POOL = 1 } ds_background_mode;

/* Deformed is the positive class. */
typedef enum ds_label { DS_LABEL_NON_DEFORMED = 0, DS_LABEL_DEFORMED = 1 } ds_label;

typedef struct ds_config ds_config;
typedef struct ds_manifest ds_manifest;
typedef struct ds_model ds_model;

typedef struct ds_confusion {
  size_t tp;
  size_t fp;
  size_t fn;
  size_t tn;
} ds_confusion;

typedef struct ds_metrics {
  double accuracy;
  double f1;
  double recall;
  double precision;
  int precision_defined;
  int recall_defined;
  int f1_defined;
} ds_metrics;

typedef struct ds_generate_result {
  size_t deformed;
  size_t non_deformed;
  int had_previous_manifest;
  size_t files_changed;
} ds_generate_result;

typedef struct ds_verify_result {
  size_t checked;
  size_t mismatched;
  size_t missing;
} ds_verify_result;

DS_API const char* ds_version(void);
DS_API const char* ds_last_error(void);
DS_API const char* ds_status_name(ds_status status);
DS_API void ds_string_free(char* text);

/* Configuration */
DS_API ds_status ds_config_default(ds_config** out);
DS_API ds_status ds_config_load(const char* path, ds_config** out);
DS_API ds_status ds_config_from_json(const char* json, ds_config** out);
/* Strict JSON overlay on the current values (unknown keys rejected). */
DS_API ds_status ds_config_overlay(ds_config* config, const char* json);
DS_API ds_status ds_config_set_seed(ds_config* config, uint64_t seed);
DS_API ds_status ds_config_get_seed(const ds_config* config, uint64_t* seed);
/* Numeric value of a dotted key such as "train.split_fraction". */
DS_API ds_status ds_config_get_number(const ds_config* config, const char* key, double* value);
DS_API ds_status ds_config_to_json(const ds_config* config, char** json);
DS_API ds_status ds_config_hash(const ds_config* config, char** hex);
DS_API void ds_config_free(ds_config* config);

/* Every config key in dotted form with its default, sorted by key. The
 * returned pointers have static lifetime. */
DS_API size_t ds_config_key_count(void);
DS_API ds_status ds_config_key(size_t index, const char** key, const char** default_value);

/* Manifests */
DS_API ds_status ds_manifest_read(const char* path, ds_manifest** out);
DS_API ds_status ds_manifest_write(const ds_manifest* manifest, const char* path);
DS_API ds_status ds_manifest_size(const ds_manifest* manifest, size_t* count);
DS_API ds_status ds_manifest_class_count(const ds_manifest* manifest, ds_label label, size_t* count);
DS_API ds_status ds_manifest_sample_label(const ds_manifest* manifest, size_t i, ds_label* label);
/* Absolute path of sample i's image. */
DS_API ds_status ds_manifest_sample_image(const ds_manifest* manifest, size_t i, char** path);
DS_API void ds_manifest_free(ds_manifest* manifest);

/* Pipeline */
DS_API ds_status ds_generate(const ds_config* config, size_t n, ds_background_mode mode, const char* out_dir,
                             int jobs, ds_generate_result* result);
DS_API ds_status ds_ingest(const char* source_dir, const char* out_dir, int image_size, ds_manifest** out);
DS_API ds_status ds_split(const ds_manifest* manifest, double fraction, uint64_t seed, ds_manifest** train,
                          ds_manifest** test);
DS_API ds_status ds_verify(const ds_manifest* manifest, ds_verify_result* result, char** problems);

/* Baseline classifier */
DS_API ds_status ds_train(const ds_config* config, const ds_manifest* train, int jobs, ds_model** out);
DS_API ds_status ds_model_save(const ds_model* model, const char* path);
DS_API ds_status ds_model_load(const char* path, ds_model** out);
DS_API void ds_model_free(ds_model* model);
DS_API ds_status ds_evaluate(const ds_model* model, const ds_manifest* test, int jobs, ds_confusion* confusion,
                             ds_metrics* metrics);
/* Evaluates and writes metrics.csv, confusion.csv and predictions.csv. */
DS_API ds_status ds_evaluate_to_dir(const ds_model* model, const ds_manifest* test, int jobs, const char* out_dir,
                                    ds_confusion* confusion, ds_metrics* metrics);
DS_API ds_status ds_metrics_from_confusion(const ds_confusion* confusion, ds_metrics* metrics);

/* PCA scatter over the union of the manifests. Writes csv_path plus a
 * metadata file csv_path + ".json"; variances (may be NULL) receives the
 * total projected variance of each dataset. */
DS_API ds_status ds_pca(const char* const* tags, const ds_manifest* const* manifests, size_t count, int k, int jobs,
                        const char* csv_path, double* variances);

/* Metrics report from evaluation directories (each holding metrics.csv
 * and optionally confusion.csv). Writes report.csv, report.txt and
 * confusion_panels.csv into out_dir; text receives the table. */
DS_API ds_status ds_report(const char* const* names, const char* const* eval_dirs, size_t count, const char* out_dir,
                           char** text);

#ifdef __cplusplus
}
#endif

#endif
