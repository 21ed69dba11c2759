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
#include <doctest.h>

#include "inverse.hpp"
#include "model.hpp"
#include "test_support.hpp"
#include "toy_data.hpp"

using namespace mrdesign;
using mrdesign::test::error_of;

namespace {

Model memorizing_model(const Dataset& ds) {
  TrainConfig cfg;
  cfg.kind = ModelKind::decision_tree;
  cfg.param_grid = ParamGrid{};
  auto r = train_model(ds, cfg, 1, 1);
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto X = feature_matrix(ds, all), Y = target_matrix(ds, all);
  for (std::size_t t = 0; t < 3; ++t) r.model.members[t].forest = fit_forest(X, Y.select_columns({t}), r.model.members[t].hp);
  for (std::size_t c = 0; c < X.cols(); ++c) {
    const auto col = X.column(c);
    r.model.feature_min[c] = *std::min_element(col.begin(), col.end());
    r.model.feature_max[c] = *std::max_element(col.begin(), col.end());
  }
  return r.model;
}

}  // namespace

TEST_CASE("export then ingest is the identity") {
  for (double d2 : {2e7, -3e7, 1e5}) {
    const auto p = integrated_dispersion(synthetic_comb(260, 30, 30, 1.21e15, 3e12, d2, 2e4));
    const auto text = export_measured(p);
    CHECK(text.rfind("wavelength_nm,dint_hz\n", 0) == 0);
    const auto back = ingest_measured_text(text, wavelength_from_omega(p.omega0()));
    CHECK(back.schema == MeasuredSchema::wavelength_dint);
    CHECK(profiles_match(p, back.profile));
  }
}

TEST_CASE("descending wavelength input is accepted") {
  const auto p = integrated_dispersion(synthetic_comb(260, 10, 10, 1.21e15, 3e12, 2e7));
  auto t = parse_csv(export_measured(p), "x");
  std::reverse(t.rows.begin(), t.rows.end());
  CHECK(profiles_match(p, ingest_measured(t, wavelength_from_omega(p.omega0())).profile));
}

TEST_CASE("resonance schema goes through the dispersion pipeline") {
  std::string csv = "mode_index,resonance_hz\n";
  for (int m = 315; m >= 295; --m) {
    const double mu = m - 305;
    csv += std::to_string(m) + ',' + format_exact(6.4e11 * m + 2e6 * mu * mu) + '\n';
  }
  const auto r = ingest_measured_text(csv, wavelength_from_frequency(6.4e11 * 305));
  CHECK(r.schema == MeasuredSchema::mode_resonance);
  CHECK(r.profile.d1() / kTwoPi == doctest::Approx(6.4e11));
  const auto fit = fit_quadratic(r.profile, ModeWindow{-10, 10});
  CHECK(fit.q2 / kTwoPi == doctest::Approx(2e6).epsilon(1e-6));
}

TEST_CASE("re-anchoring at the pump") {
  const auto p = integrated_dispersion(synthetic_comb(260, 10, 10, 1.21e15, 3e12, 2e7));
  auto t = parse_csv(export_measured(p), "x");
  for (auto& row : t.rows) row[1] = format_exact(parse_double(row[1], "d") + 5e8);
  CHECK(profiles_match(p, ingest_measured(t, wavelength_from_omega(p.omega0())).profile));
}

TEST_CASE("malformed measured files") {
  CHECK(error_of([] { ingest_measured_text("freq,dint\n1,2\n2,3\n3,4\n4,5\n5,6\n"); }) == ErrorCode::schema);
  CHECK(error_of([] { ingest_measured_text("wavelength_nm,dint_hz\n1500,0\n1510,1\n"); }) == ErrorCode::schema);
  CHECK(error_of([] {
          ingest_measured_text("wavelength_nm,dint_hz\n1500,0\n1510,1\n1505,2\n1520,3\n1530,4\n");
        }) == ErrorCode::schema);
  CHECK(error_of([] {
          ingest_measured_text("wavelength_nm,dint_hz\n1500,0\n1510,x\n1520,2\n1530,3\n1540,4\n");
        }) == ErrorCode::schema);
  // Pump at the edge.
  CHECK(error_of([] {
          ingest_measured_text("wavelength_nm,dint_hz\n1510,0\n1520,1\n1530,2\n1540,3\n1557,4\n");
        }) == ErrorCode::domain);
  CHECK(error_of([] { ingest_measured_file("/nonexistent.csv"); }) == ErrorCode::io);
}

TEST_CASE("memorized training profile gives the exact geometry") {
  const auto ds = test::toy_dataset();
  const auto model = memorizing_model(ds);
  for (const auto& rec : ds.records) {
    const auto est = predict_geometry(model, integrated_dispersion(test::toy_comb(rec.geometry)), rec.geometry);
    CHECK(est.predicted == rec.geometry);
    CHECK(est.percent_error[0] == 0.0);
    CHECK(!est.low_confidence);
  }
}

TEST_CASE("low confidence flags") {
  const auto ds = test::toy_dataset();
  const auto model = memorizing_model(ds);
  // Curvature far outside the training range.
  const auto wild = integrated_dispersion(synthetic_comb(200, 45, 45, 1.2e15, 3e12, kTwoPi * 5e7));
  const auto e1 = predict_geometry(model, wild);
  CHECK(e1.low_confidence);
  CHECK(!e1.warnings.empty());
  // Nearly dispersionless.
  const auto flat = integrated_dispersion(synthetic_comb(200, 45, 45, 1.2e15, 3e12, kTwoPi * 1.0));
  CHECK(predict_geometry(model, flat).low_confidence);
  // Narrow profile: coverage warning.
  const auto narrow = integrated_dispersion(synthetic_comb(200, 8, 8, 1.2e15, 3e12, kTwoPi * 3e5));
  const auto e3 = predict_geometry(model, narrow);
  bool coverage = false;
  for (const auto& w : e3.warnings) coverage = coverage || w.find("feature window") != std::string::npos;
  CHECK(coverage);
  const auto j = e3.to_json();
  CHECK(j.contains("predicted"));
  CHECK(j["low_confidence"].is_boolean());
}

TEST_CASE("profile comparison") {
  const auto a = integrated_dispersion(synthetic_comb(200, 40, 40, 1.2e15, 3e12, kTwoPi * 2e5));
  const auto b = integrated_dispersion(synthetic_comb(200, 40, 40, 1.2e15, 3e12, kTwoPi * 2.2e5));
  SensitivityConfig cfg;
  CHECK(compare_profiles(a, a, cfg).mape_percent == 0.0);
  const auto e = compare_profiles(a, b, cfg);
  // D_int scales with D2 away from the pump; rows under the floor are skipped.
  CHECK(e.mape_percent == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(e.excluded >= 1);
  cfg.floor_hz = 1e15;
  CHECK(error_of([&] { compare_profiles(a, b, cfg); }) == ErrorCode::domain);
}

TEST_CASE("sensitivity on a reduced grid") {
  SensitivityConfig cfg;
  cfg.delta = 0.0;
  const auto zero = sensitivity_analysis({60, 1.5, 0.65}, test::coarse_forward(), cfg, 1);
  REQUIRE(zero.entries.size() == 3);
  for (const auto& e : zero.entries) CHECK(e.mape_percent == 0.0);
  cfg.delta = 0.1;
  // Staircased cores: at 48 cells a 10% height step can leave the map unchanged.
  const auto rep = sensitivity_analysis({60, 1.5, 0.65}, test::coarse_forward(100), cfg, 1);
  CHECK(rep.entries[0].parameter == "radius");
  CHECK(rep.entries[0].perturbed_value_um == doctest::Approx(66.0));
  for (const auto& e : rep.entries) {
    CHECK(std::isfinite(e.mape_percent));
    CHECK(e.mape_percent > 0.0);
    CHECK(e.points > 5);
  }
  const auto j = rep.to_json();
  CHECK(j["parameters"].size() == 3);
  CHECK(j.dump().find("reference_percent") != std::string::npos);
}
