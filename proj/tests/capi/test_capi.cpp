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
// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "mrdesign/mrdesign.h"

namespace {

const char* kCoarse =
    R"({"mode_solver": {"nx": 40, "ny": 40}, "resonance": {"band_um": [1.45, 1.65]},
        "grid": {"radii_um": [40, 80], "widths_um": [1.2, 1.8], "heights_um": [0.6, 0.7]},
        "training": {"folds": 2, "param_grid": {"max_depth": [4], "n_estimators": [5]}},
        "split": {"ratio": 0.75}, "evaluation": {"nmae_trees": [1, 5]}})";

std::string take(char* s) {
  std::string out = s ? s : "";
  mrd_string_free(s);
  return out;
}

struct Session {
  mrd_session* s = nullptr;
  explicit Session(const char* cfg = kCoarse) {
    char* err = nullptr;
    REQUIRE(mrd_session_create(cfg, nullptr, &s, &err) == MRD_OK);
    REQUIRE(err == nullptr);
    mrd_session_set_jobs(s, 1);
  }
  ~Session() { mrd_session_destroy(s); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::strlen(mrd_version()) > 0);
  CHECK(std::string(mrd_status_string(MRD_OK)) == "ok");
  CHECK(std::string(mrd_status_string(MRD_ERR_SCHEMA)) == "schema error");
  mrd_string_free(nullptr);
}

TEST_CASE("session creation errors") {
  mrd_session* s = nullptr;
  char* err = nullptr;
  CHECK(mrd_session_create("{\"bogus\": 1}", nullptr, &s, &err) == MRD_ERR_CONFIG);
  CHECK(s == nullptr);
  CHECK(take(err).find("bogus") != std::string::npos);
  CHECK(mrd_session_create("{oops", nullptr, &s, &err) == MRD_ERR_CONFIG);
  take(err);
  CHECK(mrd_session_create(nullptr, nullptr, nullptr, nullptr) == MRD_ERR_INVALID_ARGUMENT);
  CHECK(mrd_session_create_from_file("/nonexistent.json", &s, nullptr) != MRD_OK);
  CHECK(mrd_session_create(nullptr, nullptr, &s, nullptr) == MRD_OK);
  char* cfg = nullptr;
  CHECK(mrd_session_config_json(s, &cfg) == MRD_OK);
  CHECK(take(cfg).find("\"nx\": 200") != std::string::npos);
  CHECK(mrd_session_set_jobs(s, -1) == MRD_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mrd_session_last_error(s)).find("jobs") != std::string::npos);
  mrd_session_destroy(s);
  mrd_session_destroy(nullptr);
}

TEST_CASE("material and mode queries") {
  Session s;
  double n = 0;
  CHECK(mrd_refractive_index(s.s, "SiO2", 1.55, &n) == MRD_OK);
  CHECK(n > 1.44);
  CHECK(n < 1.45);
  CHECK(mrd_refractive_index(s.s, "SiO2", 9.0, &n) == MRD_ERR_DOMAIN);
  CHECK(mrd_refractive_index(s.s, "Nope", 1.55, &n) == MRD_ERR_CONFIG);
  double straight = 0, bent = 0;
  CHECK(mrd_effective_index(s.s, 1.5, 0.65, 0, 1.55, &straight) == MRD_OK);
  CHECK(mrd_effective_index(s.s, 1.5, 0.65, 30, 1.55, &bent) == MRD_OK);
  CHECK(bent > straight);
  CHECK(mrd_effective_index(s.s, -1.0, 0.65, 0, 1.55, &straight) == MRD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("simulate, export, re-read") {
  Session s;
  mrd_profile* p = nullptr;
  REQUIRE(mrd_simulate(s.s, 60, 1.5, 0.65, &p) == MRD_OK);
  CHECK(mrd_profile_size(p) > 20);
  bool pump_zero = false;
  for (size_t i = 0; i < mrd_profile_size(p); ++i) {
    int mu = 1;
    double d = 1;
    REQUIRE(mrd_profile_point(p, i, &mu, &d, nullptr) == MRD_OK);
    if (mu == 0) pump_zero = d == 0.0;
  }
  CHECK(pump_zero);
  CHECK(mrd_profile_point(p, 100000, nullptr, nullptr, nullptr) == MRD_ERR_INVALID_ARGUMENT);
  double q[3];
  CHECK(mrd_profile_fit(p, 1.5, 1.6, q) == MRD_OK);
  CHECK(q[2] != 0.0);

  char* text = nullptr;
  REQUIRE(mrd_profile_export_measured(p, &text) == MRD_OK);
  const std::string measured = take(text);
  mrd_profile* back = nullptr;
  REQUIRE(mrd_profile_parse_measured(s.s, measured.c_str(), 1.557, &back) == MRD_OK);
  CHECK(mrd_profile_equal(p, back) == 1);
  CHECK(mrd_profile_fsr_csv(back, &text) == MRD_ERR_INVALID_ARGUMENT);
  CHECK(mrd_profile_fsr_csv(p, &text) == MRD_OK);
  CHECK(take(text).rfind("mu,m,", 0) == 0);
  CHECK(mrd_profile_summary_json(s.s, p, &text) == MRD_OK);
  CHECK(take(text).find("pump_mode_number") != std::string::npos);
  CHECK(mrd_profile_parse_measured(s.s, "a,b\n1,2\n", 1.557, &back) == MRD_ERR_SCHEMA);
  mrd_profile_destroy(back);
  mrd_profile_destroy(p);
}

TEST_CASE("sweep, train, evaluate, predict") {
  Session s;
  mrd_dataset* ds = nullptr;
  size_t calls = 0;
  auto cb = [](size_t, size_t total, void* user) {
    ++*static_cast<size_t*>(user);
    CHECK(total == 8);
  };
  REQUIRE(mrd_dataset_generate(s.s, cb, &calls, &ds) == MRD_OK);
  CHECK(calls == 8);
  CHECK(mrd_dataset_size(ds) == 8);
  CHECK(mrd_dataset_reject_count(ds) == 0);

  mrd_model* m = nullptr;
  REQUIRE(mrd_model_train(s.s, ds, &m) == MRD_OK);
  CHECK(mrd_model_feature_count(m) == 3);
  char* table = nullptr;
  CHECK(mrd_model_grid_table_csv(m, &table) == MRD_OK);
  CHECK(take(table).rfind("target,", 0) == 0);

  char *metrics = nullptr, *ape = nullptr;
  REQUIRE(mrd_evaluate(s.s, m, ds, &metrics, &ape, nullptr) == MRD_OK);
  const auto mj = take(metrics);
  for (const char* t : {"radius_um", "width_um", "height_um"}) CHECK(mj.find(t) != std::string::npos);
  CHECK(mj.find("mape_percent") != std::string::npos);
  take(ape);

  double geo[3] = {0, 0, 0};
  const double feats[3] = {0, 0, -1e6};
  CHECK(mrd_model_predict_features(s.s, m, feats, 3, geo) == MRD_OK);
  CHECK(geo[0] >= 40);
  CHECK(mrd_model_predict_features(s.s, m, feats, 2, geo) == MRD_ERR_INVALID_ARGUMENT);

  char* report = nullptr;
  CHECK(mrd_round_trip(s.s, m, 40, 1.2, 0.6, &report) == MRD_OK);
  CHECK(take(report).find("dint_rms_hz") != std::string::npos);

  mrd_model_destroy(m);
  mrd_dataset_destroy(ds);
}

TEST_CASE("sensitivity with delta zero") {
  Session s;
  char* report = nullptr;
  REQUIRE(mrd_sensitivity(s.s, 60, 1.5, 0.65, 0.0, &report) == MRD_OK);
  const auto r = take(report);
  CHECK(r.find("\"dint_mape_percent\": 0.0") != std::string::npos);
  CHECK(mrd_sensitivity(s.s, 60, -1.5, 0.65, 0.1, &report) == MRD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("selfcheck through the C interface") {
  Session s(nullptr);
  int failures = -1, seen = 0;
  auto cb = [](const char*, int, const char*, double, void* user) { ++*static_cast<int*>(user); };
  CHECK(mrd_selfcheck(s.s, cb, &seen, &failures) == MRD_OK);
  CHECK(failures == 0);
  CHECK(seen >= 20);
}

TEST_CASE("null handles are rejected") {
  CHECK(mrd_profile_size(nullptr) == 0);
  CHECK(mrd_profile_d1_hz(nullptr, nullptr) == MRD_ERR_INVALID_ARGUMENT);
  CHECK(mrd_simulate(nullptr, 1, 1, 1, nullptr) == MRD_ERR_INVALID_ARGUMENT);
  CHECK(mrd_profile_equal(nullptr, nullptr) == 0);
}
