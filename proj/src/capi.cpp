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
#include "mrdesign/mrdesign.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "common.hpp"
#include "dataset.hpp"
#include "inverse.hpp"
#include "model.hpp"
#include "run_config.hpp"
#include "selfcheck.hpp"

using namespace mrdesign;

struct mrd_session {
  RunConfig config;
  std::string last_error;
};

struct mrd_profile {
  std::optional<ResonanceSet> resonances;
  DintProfile profile;
  std::optional<Geometry> geometry;
};

struct mrd_dataset {
  Dataset data;
};

struct mrd_model {
  Model model;
  std::string grid_table;
};

namespace {

mrd_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return MRD_ERR_INVALID_ARGUMENT;
    case ErrorCode::config: return MRD_ERR_CONFIG;
    case ErrorCode::domain: return MRD_ERR_DOMAIN;
    case ErrorCode::not_converged: return MRD_ERR_NOT_CONVERGED;
    case ErrorCode::unguided: return MRD_ERR_UNGUIDED;
    case ErrorCode::consistency: return MRD_ERR_CONSISTENCY;
    case ErrorCode::io: return MRD_ERR_IO;
    case ErrorCode::schema: return MRD_ERR_SCHEMA;
    case ErrorCode::rejects: return MRD_ERR_REJECTS;
    case ErrorCode::internal: return MRD_ERR_INTERNAL;
  }
  return MRD_ERR_INTERNAL;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename F>
mrd_status guard(std::string* err, F&& body) {
  try {
    body();
    if (err) err->clear();
    return MRD_OK;
  } catch (const Error& e) {
    if (err) *err = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    if (err) *err = "out of memory";
    return MRD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    if (err) *err = e.what();
    return MRD_ERR_INTERNAL;
  }
}

template <typename F>
mrd_status with_session(mrd_session* s, F&& body) {
  if (!s) return MRD_ERR_INVALID_ARGUMENT;
  return guard(&s->last_error, std::forward<F>(body));
}

template <typename F>
mrd_status detached(F&& body) {
  return guard(nullptr, std::forward<F>(body));
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

void set_string(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

Geometry geometry_of(double r, double w, double h) {
  ResonatorSpec spec;
  spec.radius_um = r;
  spec.width_um = w;
  spec.height_um = h;
  spec.validate();
  return {r, w, h};
}

nlohmann::json profile_summary(const RunConfig& cfg, const mrd_profile& p) {
  const auto& prof = p.profile;
  nlohmann::json j;
  if (p.geometry)
    j["geometry"] = {{"radius_um", p.geometry->radius_um},
                     {"width_um", p.geometry->width_um},
                     {"height_um", p.geometry->height_um}};
  j["modes"] = prof.size();
  j["mu_range"] = {prof.points().front().mu, prof.points().back().mu};
  j["wavelength_range_um"] = {profile_min_wavelength_um(prof), profile_max_wavelength_um(prof)};
  j["pump_wavelength_um"] = wavelength_from_omega(prof.omega0());
  j["pump_frequency_hz"] = prof.omega0() / kTwoPi;
  j["d1_over_2pi_hz"] = prof.d1() / kTwoPi;
  const auto fit = fit_quadratic(prof, cfg.features.window);
  j["fit"] = {{"window_um", {cfg.features.window.lo_um, cfg.features.window.hi_um}},
              {"q0_hz", fit.q0 / kTwoPi},
              {"q1_hz", fit.q1 / kTwoPi},
              {"q2_hz", fit.q2 / kTwoPi},
              {"d2_over_2pi_hz", 2.0 * fit.q2 / kTwoPi},
              {"points", fit.points},
              {"residual_rms_hz", fit.residual_rms / kTwoPi}};
  if (p.resonances) {
    j["pump_mode_number"] = p.resonances->pump_m;
    auto checks = nlohmann::json::array();
    for (const auto& c : p.resonances->spot_checks)
      checks.push_back({{"m", c.m},
                        {"interpolated_hz", c.interpolated_hz},
                        {"direct_hz", c.direct_hz},
                        {"difference_hz", c.interpolated_hz - c.direct_hz},
                        {"iterations", c.iterations}});
    j["spot_checks"] = checks;
    j["solver"] = forward_config_json(cfg.forward);
    j["solver"].erase("materials");
  }
  return j;
}

}  // namespace

extern "C" {

const char* mrd_version(void) { return MRDESIGN_VERSION; }

const char* mrd_status_string(mrd_status status) {
  switch (status) {
    case MRD_OK: return "ok";
    case MRD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MRD_ERR_CONFIG: return "configuration error";
    case MRD_ERR_DOMAIN: return "domain error";
    case MRD_ERR_NOT_CONVERGED: return "not converged";
    case MRD_ERR_UNGUIDED: return "mode not guided";
    case MRD_ERR_CONSISTENCY: return "consistency check failed";
    case MRD_ERR_IO: return "i/o error";
    case MRD_ERR_SCHEMA: return "schema error";
    case MRD_ERR_REJECTS: return "too many rejected geometries";
    case MRD_ERR_SELFCHECK: return "selfcheck failed";
    case MRD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mrd_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------- session

mrd_status mrd_session_create(const char* config_json, const char* base_dir, mrd_session** out, char** error_message) {
  if (error_message) *error_message = nullptr;
  if (!out) return MRD_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  std::string err;
  auto* s = new (std::nothrow) mrd_session;
  if (!s) return MRD_ERR_INTERNAL;
  const auto st = guard(&err, [&] {
    if (config_json) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
      }
      s->config = RunConfig::from_json(j, base_dir ? base_dir : ".");
    }
  });
  if (st != MRD_OK) {
    delete s;
    if (error_message) *error_message = dup(err);
    return st;
  }
  *out = s;
  return MRD_OK;
}

mrd_status mrd_session_create_from_file(const char* config_path, mrd_session** out, char** error_message) {
  if (error_message) *error_message = nullptr;
  if (!out || !config_path) return MRD_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  std::string err;
  auto* s = new (std::nothrow) mrd_session;
  if (!s) return MRD_ERR_INTERNAL;
  const auto st = guard(&err, [&] { s->config = RunConfig::load(config_path); });
  if (st != MRD_OK) {
    delete s;
    if (error_message) *error_message = dup(err);
    return st;
  }
  *out = s;
  return MRD_OK;
}

void mrd_session_destroy(mrd_session* session) { delete session; }

const char* mrd_session_last_error(const mrd_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

mrd_status mrd_session_set_jobs(mrd_session* session, int jobs) {
  return with_session(session, [&] {
    if (jobs < 0) fail(ErrorCode::invalid_argument, "jobs must be >= 0");
    session->config.jobs = jobs;
  });
}

mrd_status mrd_session_set_seed(mrd_session* session, uint64_t seed) {
  return with_session(session, [&] { session->config.seed = seed; });
}

mrd_status mrd_session_config_json(mrd_session* session, char** out) {
  return with_session(session, [&] {
    need(out, "out");
    *out = dup(session->config.to_json().dump(2));
  });
}

// ---------------------------------------------------------------- forward

mrd_status mrd_refractive_index(mrd_session* session, const char* material, double lambda_um, double* out) {
  return with_session(session, [&] {
    need(material, "material");
    need(out, "out");
    *out = session->config.forward.materials.get(material).refractive_index(lambda_um);
  });
}

mrd_status mrd_effective_index(mrd_session* session, double width_um, double height_um, double bend_radius_um,
                               double lambda_um, double* out) {
  return with_session(session, [&] {
    need(out, "out");
    const auto& mode = session->config.forward.mode;
    CrossSection xs;
    xs.core_width_um = width_um;
    xs.core_height_um = height_um;
    xs.clad_width_um = mode.clad_width_um;
    xs.clad_height_um = mode.clad_height_um;
    if (bend_radius_um > 0.0) xs.bend_radius_um = bend_radius_um;
    xs.validate();
    *out = effective_index(xs, lambda_um, session->config.forward.materials, mode);
  });
}

mrd_status mrd_simulate(mrd_session* session, double radius_um, double width_um, double height_um, mrd_profile** out) {
  return with_session(session, [&] {
    need(out, "out");
    *out = nullptr;
    const auto g = geometry_of(radius_um, width_um, height_um);
    auto sim = simulate(resonator_for(g, session->config.forward), session->config.forward);
    *out = new mrd_profile{std::move(sim.resonances), std::move(sim.profile), g};
  });
}

mrd_status mrd_profile_read_measured(mrd_session* session, const char* path, double pump_um, mrd_profile** out) {
  return with_session(session, [&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto m = ingest_measured_file(path, pump_um);
    *out = new mrd_profile{std::nullopt, std::move(m.profile), std::nullopt};
  });
}

mrd_status mrd_profile_parse_measured(mrd_session* session, const char* csv_text, double pump_um, mrd_profile** out) {
  return with_session(session, [&] {
    need(csv_text, "csv_text");
    need(out, "out");
    *out = nullptr;
    auto m = ingest_measured_text(csv_text, pump_um);
    *out = new mrd_profile{std::nullopt, std::move(m.profile), std::nullopt};
  });
}

void mrd_profile_destroy(mrd_profile* profile) { delete profile; }

size_t mrd_profile_size(const mrd_profile* profile) { return profile ? profile->profile.size() : 0; }

mrd_status mrd_profile_point(const mrd_profile* profile, size_t index, int* mu, double* dint_hz, double* wavelength_um) {
  return detached([&] {
    need(profile, "profile");
    if (index >= profile->profile.size()) fail(ErrorCode::invalid_argument, "profile index out of range");
    const auto& p = profile->profile.points()[index];
    if (mu) *mu = p.mu;
    if (dint_hz) *dint_hz = p.dint / kTwoPi;
    if (wavelength_um) *wavelength_um = p.wavelength_um();
  });
}

mrd_status mrd_profile_d1_hz(const mrd_profile* profile, double* out) {
  return detached([&] {
    need(profile, "profile");
    need(out, "out");
    *out = profile->profile.d1() / kTwoPi;
  });
}

mrd_status mrd_profile_fit(const mrd_profile* profile, double lo_um, double hi_um, double q_hz[3]) {
  return detached([&] {
    need(profile, "profile");
    need(q_hz, "q_hz");
    const auto fit = fit_quadratic(profile->profile, WavelengthWindow{lo_um, hi_um});
    q_hz[0] = fit.q0 / kTwoPi;
    q_hz[1] = fit.q1 / kTwoPi;
    q_hz[2] = fit.q2 / kTwoPi;
  });
}

mrd_status mrd_profile_dint_csv(const mrd_profile* profile, char** out) {
  return detached([&] {
    need(profile, "profile");
    need(out, "out");
    *out = dup(dint_csv(profile->profile));
  });
}

mrd_status mrd_profile_fsr_csv(const mrd_profile* profile, char** out) {
  return detached([&] {
    need(profile, "profile");
    need(out, "out");
    if (!profile->resonances) fail(ErrorCode::invalid_argument, "profile has no resonance set");
    *out = dup(fsr_csv(*profile->resonances));
  });
}

mrd_status mrd_profile_export_measured(const mrd_profile* profile, char** out) {
  return detached([&] {
    need(profile, "profile");
    need(out, "out");
    *out = dup(export_measured(profile->profile));
  });
}

mrd_status mrd_profile_summary_json(mrd_session* session, const mrd_profile* profile, char** out) {
  return with_session(session, [&] {
    need(profile, "profile");
    need(out, "out");
    *out = dup(profile_summary(session->config, *profile).dump(2));
  });
}

int mrd_profile_equal(const mrd_profile* a, const mrd_profile* b) {
  if (!a || !b) return 0;
  return profiles_match(a->profile, b->profile) ? 1 : 0;
}

// ---------------------------------------------------------------- datasets

mrd_status mrd_dataset_generate(mrd_session* session, mrd_progress_fn progress, void* user, mrd_dataset** out) {
  return with_session(session, [&] {
    need(out, "out");
    *out = nullptr;
    const auto& cfg = session->config;
    ProgressFn fn;
    if (progress) fn = [&](std::size_t done, std::size_t total) { progress(done, total, user); };
    auto ds = generate_dataset(cfg.grid, cfg.forward, cfg.features, cfg.seed, cfg.jobs, fn);
    *out = new mrd_dataset{std::move(ds)};
  });
}

mrd_status mrd_dataset_load(mrd_session* session, const char* csv_path, mrd_dataset** out) {
  return with_session(session, [&] {
    need(csv_path, "csv_path");
    need(out, "out");
    *out = nullptr;
    *out = new mrd_dataset{load_dataset(csv_path)};
  });
}

mrd_status mrd_dataset_save(mrd_session* session, const mrd_dataset* dataset, const char* csv_path) {
  return with_session(session, [&] {
    need(dataset, "dataset");
    need(csv_path, "csv_path");
    save_dataset(dataset->data, csv_path);
  });
}

size_t mrd_dataset_size(const mrd_dataset* dataset) { return dataset ? dataset->data.size() : 0; }

size_t mrd_dataset_reject_count(const mrd_dataset* dataset) {
  return dataset ? dataset->data.meta.rejects.size() : 0;
}

void mrd_dataset_destroy(mrd_dataset* dataset) { delete dataset; }

// ---------------------------------------------------------------- models

mrd_status mrd_model_train(mrd_session* session, const mrd_dataset* dataset, mrd_model** out) {
  return with_session(session, [&] {
    need(dataset, "dataset");
    need(out, "out");
    *out = nullptr;
    const auto& cfg = session->config;
    auto result = train_model(dataset->data, cfg.training, cfg.seed, cfg.jobs);
    auto table = result.grid_table_csv();
    *out = new mrd_model{std::move(result.model), std::move(table)};
  });
}

mrd_status mrd_model_grid_table_csv(const mrd_model* model, char** out) {
  return detached([&] {
    need(model, "model");
    need(out, "out");
    *out = dup(model->grid_table);
  });
}

mrd_status mrd_model_save(mrd_session* session, const mrd_model* model, const char* path) {
  return with_session(session, [&] {
    need(model, "model");
    need(path, "path");
    save_model(model->model, path);
  });
}

mrd_status mrd_model_load(mrd_session* session, const char* path, mrd_model** out) {
  return with_session(session, [&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new mrd_model{load_model(path), std::string()};
  });
}

void mrd_model_destroy(mrd_model* model) { delete model; }

size_t mrd_model_feature_count(const mrd_model* model) { return model ? model->model.features.size() : 0; }

mrd_status mrd_model_predict_features(mrd_session* session, const mrd_model* model, const double* features,
                                      size_t n_features, double geometry_um[3]) {
  return with_session(session, [&] {
    need(model, "model");
    need(features, "features");
    need(geometry_um, "geometry_um");
    const auto y = model->model.predict(std::vector<double>(features, features + n_features));
    for (int i = 0; i < 3; ++i) geometry_um[i] = y[static_cast<std::size_t>(i)];
  });
}

mrd_status mrd_evaluate(mrd_session* session, const mrd_model* model, const mrd_dataset* dataset, char** metrics_json,
                        char** ape_csv, char** nmae_csv) {
  return with_session(session, [&] {
    need(model, "model");
    need(dataset, "dataset");
    const auto rows = recorded_test_rows(model->model, dataset->data);
    const auto report = evaluate_model(model->model, dataset->data, rows);
    auto j = report.to_json();
    j["model_kind"] = to_string(model->model.kind);
    j["dataset_hash"] = dataset->data.content_hash();
    const std::string metrics = j.dump(2);
    const std::string ape = report.ape_csv();
    const std::string nm = nmae_vs_trees_csv(model->model, dataset->data, rows, session->config.nmae_trees);
    set_string(metrics_json, metrics);
    set_string(ape_csv, ape);
    set_string(nmae_csv, nm);
  });
}

// ---------------------------------------------------------------- inverse

mrd_status mrd_predict_geometry(mrd_session* session, const mrd_model* model, const mrd_profile* profile,
                                double geometry_um[3], char** report_json) {
  return with_session(session, [&] {
    need(model, "model");
    need(profile, "profile");
    const auto est = predict_geometry(model->model, profile->profile, profile->geometry);
    if (geometry_um) {
      geometry_um[0] = est.predicted.radius_um;
      geometry_um[1] = est.predicted.width_um;
      geometry_um[2] = est.predicted.height_um;
    }
    set_string(report_json, est.to_json().dump(2));
  });
}

mrd_status mrd_sensitivity(mrd_session* session, double radius_um, double width_um, double height_um, double delta,
                           char** report_json) {
  return with_session(session, [&] {
    need(report_json, "report_json");
    const auto g = geometry_of(radius_um, width_um, height_um);
    auto cfg = session->config.sensitivity;
    if (delta >= 0.0) cfg.delta = delta;
    const auto rep = sensitivity_analysis(g, session->config.forward, cfg, session->config.jobs);
    *report_json = dup(rep.to_json().dump(2));
  });
}

mrd_status mrd_round_trip(mrd_session* session, const mrd_model* model, double radius_um, double width_um,
                          double height_um, char** report_json) {
  return with_session(session, [&] {
    need(model, "model");
    need(report_json, "report_json");
    const auto g = geometry_of(radius_um, width_um, height_um);
    *report_json = dup(round_trip(model->model, g, session->config.forward).to_json().dump(2));
  });
}

// ---------------------------------------------------------------- selfcheck

mrd_status mrd_selfcheck(mrd_session* session, mrd_check_fn on_check, void* user, int* failures) {
  int failed = 0;
  const auto st = with_session(session, [&] {
    run_selfcheck(
        [&](const CheckResult& r) {
          if (!r.passed) ++failed;
          if (on_check) on_check(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
        },
        session->config.jobs);
  });
  if (failures) *failures = failed;
  if (st != MRD_OK) return st;
  if (failed > 0) {
    session->last_error = std::to_string(failed) + " selfcheck(s) failed";
    return MRD_ERR_SELFCHECK;
  }
  return MRD_OK;
}

}  // extern "C"
