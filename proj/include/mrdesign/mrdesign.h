/*
Copyright 2026 The mrdesign Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#ifndef MRDESIGN_H
#define MRDESIGN_H

/*
 * C interface to the mrdesign library: ring-resonator dispersion simulation
 * and geometry regression.
 *
 * All handles are opaque. Every call returns an mrd_status; on failure the
 * calls that take a session store a message retrievable with
 * mrd_session_last_error until the next call on that session. Strings
 * returned through char** are owned by the caller and released with
 * mrd_string_free. A session may be used from one thread at a time; distinct
 * sessions are independent.
 *
 * Units: lengths in micrometres, frequencies in Hz unless a name says
 * otherwise.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MRDESIGN_BUILDING_LIBRARY)
#define MRD_API __declspec(dllexport)
#else
#define MRD_API __declspec(dllimport)
#endif
#else
#define MRD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrd_status {
  MRD_OK = 0,
  MRD_ERR_INVALID_ARGUMENT = 1,
  MRD_ERR_CONFIG = 2,
  MRD_ERR_DOMAIN = 3,        /* wavelength outside a material's range, empty band, too few points */
  MRD_ERR_NOT_CONVERGED = 4, /* eigen or resonance iteration */
  MRD_ERR_UNGUIDED = 5,
  MRD_ERR_CONSISTENCY = 6,   /* interpolated and direct resonances disagree */
  MRD_ERR_IO = 7,
  MRD_ERR_SCHEMA = 8,        /* malformed dataset, model or measured file */
  MRD_ERR_REJECTS = 9,       /* too many failed geometries in a sweep */
  MRD_ERR_SELFCHECK = 10,
  MRD_ERR_INTERNAL = 11
} mrd_status;

typedef struct mrd_session mrd_session;
typedef struct mrd_profile mrd_profile;
typedef struct mrd_dataset mrd_dataset;
typedef struct mrd_model mrd_model;

MRD_API const char* mrd_version(void);
MRD_API const char* mrd_status_string(mrd_status status);
MRD_API void mrd_string_free(char* s);

/* ---- session ------------------------------------------------------------ */

/* config_json may be NULL for defaults. base_dir resolves a relative
 * materials_file and may be NULL (current directory). On a config error
 * *out is still NULL and the message is written to *error_message when that
 * pointer is non-NULL. */
MRD_API mrd_status mrd_session_create(const char* config_json, const char* base_dir, mrd_session** out,
                                      char** error_message);
MRD_API mrd_status mrd_session_create_from_file(const char* config_path, mrd_session** out, char** error_message);
MRD_API void mrd_session_destroy(mrd_session* session);
MRD_API const char* mrd_session_last_error(const mrd_session* session);
/* 0 = all cores. */
MRD_API mrd_status mrd_session_set_jobs(mrd_session* session, int jobs);
MRD_API mrd_status mrd_session_set_seed(mrd_session* session, uint64_t seed);
/* Effective configuration after defaults. */
MRD_API mrd_status mrd_session_config_json(mrd_session* session, char** out);

/* ---- forward model ------------------------------------------------------ */

MRD_API mrd_status mrd_refractive_index(mrd_session* session, const char* material, double lambda_um, double* out);
/* bend_radius_um <= 0 solves the straight guide. */
MRD_API mrd_status mrd_effective_index(mrd_session* session, double width_um, double height_um,
                                       double bend_radius_um, double lambda_um, double* out);

MRD_API mrd_status mrd_simulate(mrd_session* session, double radius_um, double width_um, double height_um,
                                mrd_profile** out);
/* Measured CSV: "wavelength_nm,dint_hz" or "mode_index,resonance_hz". */
MRD_API mrd_status mrd_profile_read_measured(mrd_session* session, const char* path, double pump_um,
                                             mrd_profile** out);
MRD_API mrd_status mrd_profile_parse_measured(mrd_session* session, const char* csv_text, double pump_um,
                                              mrd_profile** out);
MRD_API void mrd_profile_destroy(mrd_profile* profile);

MRD_API size_t mrd_profile_size(const mrd_profile* profile);
/* Any output pointer may be NULL. */
MRD_API mrd_status mrd_profile_point(const mrd_profile* profile, size_t index, int* mu, double* dint_hz,
                                     double* wavelength_um);
MRD_API mrd_status mrd_profile_d1_hz(const mrd_profile* profile, double* out);
/* Quadratic fit D_int/2π ≈ q[0] + q[1] µ + q[2] µ² over the wavelength window. */
MRD_API mrd_status mrd_profile_fit(const mrd_profile* profile, double lo_um, double hi_um, double q_hz[3]);
MRD_API mrd_status mrd_profile_dint_csv(const mrd_profile* profile, char** out);
/* Only for simulated profiles; MRD_ERR_INVALID_ARGUMENT otherwise. */
MRD_API mrd_status mrd_profile_fsr_csv(const mrd_profile* profile, char** out);
MRD_API mrd_status mrd_profile_export_measured(const mrd_profile* profile, char** out);
MRD_API mrd_status mrd_profile_summary_json(mrd_session* session, const mrd_profile* profile, char** out);
/* 1 when both profiles agree to a relative 1e-9, 0 otherwise. */
MRD_API int mrd_profile_equal(const mrd_profile* a, const mrd_profile* b);

/* ---- datasets ----------------------------------------------------------- */

typedef void (*mrd_progress_fn)(size_t done, size_t total, void* user);

/* Sweeps the session's grid. progress may be NULL. */
MRD_API mrd_status mrd_dataset_generate(mrd_session* session, mrd_progress_fn progress, void* user,
                                        mrd_dataset** out);
MRD_API mrd_status mrd_dataset_load(mrd_session* session, const char* csv_path, mrd_dataset** out);
/* Writes the CSV and its .meta.json sidecar. */
MRD_API mrd_status mrd_dataset_save(mrd_session* session, const mrd_dataset* dataset, const char* csv_path);
MRD_API size_t mrd_dataset_size(const mrd_dataset* dataset);
MRD_API size_t mrd_dataset_reject_count(const mrd_dataset* dataset);
MRD_API void mrd_dataset_destroy(mrd_dataset* dataset);

/* ---- models ------------------------------------------------------------- */

/* Split, grid search with k-fold cross-validation, final fit. */
MRD_API mrd_status mrd_model_train(mrd_session* session, const mrd_dataset* dataset, mrd_model** out);
/* Grid-search table of the training run; empty for loaded models. */
MRD_API mrd_status mrd_model_grid_table_csv(const mrd_model* model, char** out);
MRD_API mrd_status mrd_model_save(mrd_session* session, const mrd_model* model, const char* path);
MRD_API mrd_status mrd_model_load(mrd_session* session, const char* path, mrd_model** out);
MRD_API void mrd_model_destroy(mrd_model* model);
MRD_API size_t mrd_model_feature_count(const mrd_model* model);
/* Raw features (q0, q1, q2[, D1] in Hz) to (radius, width, height). */
MRD_API mrd_status mrd_model_predict_features(mrd_session* session, const mrd_model* model, const double* features,
                                              size_t n_features, double geometry_um[3]);

/* Metrics on the model's recorded test split. Any output may be NULL. */
MRD_API mrd_status mrd_evaluate(mrd_session* session, const mrd_model* model, const mrd_dataset* dataset,
                                char** metrics_json, char** ape_csv, char** nmae_csv);

/* ---- inverse design ----------------------------------------------------- */

/* geometry_um may be NULL. */
MRD_API mrd_status mrd_predict_geometry(mrd_session* session, const mrd_model* model, const mrd_profile* profile,
                                        double geometry_um[3], char** report_json);
/* delta < 0 takes the session's configured value. */
MRD_API mrd_status mrd_sensitivity(mrd_session* session, double radius_um, double width_um, double height_um,
                                   double delta, char** report_json);
MRD_API mrd_status mrd_round_trip(mrd_session* session, const mrd_model* model, double radius_um, double width_um,
                                  double height_um, char** report_json);

/* ---- self test ---------------------------------------------------------- */

typedef void (*mrd_check_fn)(const char* name, int passed, const char* detail, double seconds, void* user);

/* Runs the built-in oracle checks. Returns MRD_ERR_SELFCHECK when any fails;
 * *failures (may be NULL) receives the count. */
MRD_API mrd_status mrd_selfcheck(mrd_session* session, mrd_check_fn on_check, void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif
