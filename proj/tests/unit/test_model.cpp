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

#include <filesystem>

#include "model.hpp"
#include "test_support.hpp"
#include "toy_data.hpp"

using namespace mrdesign;
using mrdesign::test::error_of;

namespace {

TrainConfig small_config(ModelKind kind) {
  TrainConfig cfg;
  cfg.kind = kind;
  ParamGrid g;
  g.max_depth = {4, std::nullopt};
  g.min_samples_leaf = {1, 2};
  g.n_estimators = {kind == ModelKind::random_forest ? 15 : 1};
  cfg.param_grid = g;
  return cfg;
}

}  // namespace

TEST_CASE("default grids") {
  const auto rf = TrainConfig::default_grid(ModelKind::random_forest);
  CHECK(rf.max_depth.size() == 3);
  CHECK(rf.n_estimators == std::vector<int>{180, 200});
  const auto dt = TrainConfig::default_grid(ModelKind::decision_tree);
  CHECK(dt.n_estimators == std::vector<int>{1});
  CHECK(dt.max_depth.size() == 5);
  CHECK(model_kind_from_string("rf") == ModelKind::random_forest);
  CHECK(error_of([] { model_kind_from_string("svm"); }).has_value());
}

TEST_CASE("training is deterministic and records its split") {
  const auto ds = test::toy_dataset();
  const auto a = train_model(ds, small_config(ModelKind::random_forest), 7, 1);
  const auto b = train_model(ds, small_config(ModelKind::random_forest), 7, 3);
  CHECK(model_to_json(a.model) == model_to_json(b.model));
  CHECK(a.grid_table_csv() == b.grid_table_csv());
  CHECK(a.split.test.size() == 12);
  CHECK(a.model.members.size() == 3);
  CHECK(a.model.members[1].name == "width_um");
  CHECK(recorded_test_rows(a.model, ds) == a.split.test);
  const auto c = train_model(ds, small_config(ModelKind::random_forest), 8, 1);
  CHECK(model_to_json(c.model) != model_to_json(a.model));
}

TEST_CASE("decision tree models have one unbagged tree per target") {
  const auto ds = test::toy_dataset();
  const auto r = train_model(ds, small_config(ModelKind::decision_tree), 1, 1);
  for (const auto& m : r.model.members) {
    CHECK(m.forest.size() == 1);
    CHECK(!m.hp.bootstrap);
  }
}

TEST_CASE("multi-output and normalized variants") {
  const auto ds = test::toy_dataset();
  auto cfg = small_config(ModelKind::random_forest);
  cfg.multi_output = true;
  cfg.normalize = true;
  const auto r = train_model(ds, cfg, 3, 1);
  CHECK(r.model.multi_output());
  CHECK(r.model.members[0].name == "multi_output");
  REQUIRE(r.model.feature_norm.has_value());
  const auto p = r.model.predict(ds.records[0].features);
  CHECK(p.size() == 3);
  CHECK(p[0] >= 30.0);
  CHECK(p[0] <= 120.0);
  // Round trip through JSON keeps predictions bitwise.
  const auto back = model_from_json(model_to_json(r.model));
  for (const auto& rec : ds.records) CHECK(back.predict(rec.features) == r.model.predict(rec.features));
}

TEST_CASE("model file round trip and corruption") {
  const auto ds = test::toy_dataset();
  const auto r = train_model(ds, small_config(ModelKind::random_forest), 2, 1);
  const auto dir = std::filesystem::temp_directory_path() / "mrd_model_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "m.json").string();
  save_model(r.model, path);
  const auto back = load_model(path);
  for (const auto& rec : ds.records) CHECK(back.predict(rec.features) == r.model.predict(rec.features));
  CHECK(back.feature_min == r.model.feature_min);
  CHECK(back.max_abs_q2 == r.model.max_abs_q2);

  auto j = model_to_json(r.model);
  j["schema_version"] = 99;
  CHECK(error_of([&] { model_from_json(j); }) == ErrorCode::schema);
  j = model_to_json(r.model);
  j["per_target"].erase("height_um");
  CHECK(error_of([&] { model_from_json(j); }) == ErrorCode::schema);
  write_text_file(path, "{not json");
  CHECK(error_of([&] { load_model(path); }) == ErrorCode::schema);
}

TEST_CASE("evaluation report") {
  const auto ds = test::toy_dataset();
  const auto r = train_model(ds, small_config(ModelKind::random_forest), 4, 1);
  const auto rows = recorded_test_rows(r.model, ds);
  const auto rep = evaluate_model(r.model, ds, rows);
  const auto j = rep.to_json();
  CHECK(j["n_samples"] == 12);
  for (const char* t : {"radius_um", "width_um", "height_um"}) {
    CHECK(j["per_target"].contains(t));
    CHECK(j["per_target"][t]["mape_percent"].get<double>() >= 0.0);
    CHECK(j["per_target"][t]["nmae_um"].get<double>() <= 0.0);
  }
  // MAPE recomputed from the per-sample errors.
  const auto& w = rep.at("width_um");
  double s = 0;
  for (double e : w.ape) s += e;
  CHECK(w.mape == doctest::Approx(s / w.ape.size()));
  const auto csv = rep.ape_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  const auto nm = nmae_vs_trees_csv(r.model, ds, rows, {1, 5, 15, 500});
  CHECK(nm.rfind("n_estimators,", 0) == 0);
  CHECK(std::count(nm.begin(), nm.end(), '\n') == 4);  // 500 exceeds the forest

  Dataset other = ds;
  other.records.pop_back();
  CHECK(error_of([&] { recorded_test_rows(r.model, other); }) == ErrorCode::config);
}

TEST_CASE("learned model beats the mean predictor on smooth data") {
  const auto ds = test::toy_dataset(GridSpec{{30, 50, 70, 90, 110, 130}, {1.0, 1.2, 1.4, 1.6, 1.8, 2.0}, {0.5, 0.6, 0.7, 0.8}});
  const auto r = train_model(ds, small_config(ModelKind::random_forest), 5, 1);
  const auto rep = evaluate_model(r.model, ds, r.split.test);
  CHECK(rep.at("radius_um").mape < 20.0);
  CHECK(rep.at("width_um").mape < 20.0);
}
