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
#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "model.hpp"

namespace mrdesign {

ParamGrid TrainConfig::default_grid(ModelKind kind) {
  ParamGrid g;
  if (kind == ModelKind::decision_tree) {
    g.max_depth = {4, 8, 12, 20, 80};
    g.min_samples_leaf = {1, 3, 7};
    g.n_estimators = {1};
  } else {
    g.max_depth = {12, 20, 80};
    g.min_samples_leaf = {1, 3, 7};
    g.n_estimators = {180, 200};
  }
  return g;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"model", to_string(kind)},
          {"normalize", normalize},
          {"multi_output", multi_output},
          {"split_ratio", split_ratio},
          {"folds", folds},
          {"param_grid", grid().to_json()}};
}

Matrix feature_matrix(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Matrix X(rows.size(), ds.features.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = ds.records.at(rows[r]).features;
    for (std::size_t c = 0; c < f.size(); ++c) X(r, c) = f[c];
  }
  return X;
}

Matrix target_matrix(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Matrix Y(rows.size(), kTargetNames.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto g = ds.records.at(rows[r]).geometry.values();
    for (std::size_t c = 0; c < g.size(); ++c) Y(r, c) = g[c];
  }
  return Y;
}

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(m.row_vector(i));
  return out;
}

Matrix normalized(const Matrix& m, const MinMaxNormalizer& norm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = norm.apply(j, m(i, j));
  return out;
}

}  // namespace

TrainResult train_model(const Dataset& ds, const TrainConfig& cfg, std::uint64_t seed, int jobs) {
  if (cfg.folds < 2) fail(ErrorCode::config, "training needs at least 2 folds");
  TrainResult result;
  result.split = split_train_test(ds.size(), cfg.split_ratio, derive_seed(seed, 0));
  const auto& train = result.split.train;
  if (train.size() < cfg.folds)
    fail(ErrorCode::config, "training split has fewer rows than cross-validation folds");

  Matrix X = feature_matrix(ds, train);
  Matrix Y = target_matrix(ds, train);

  Model& model = result.model;
  model.kind = cfg.kind;
  model.features = ds.features;
  model.feature_min = model.feature_max = X.row_vector(0);
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t c = 0; c < X.cols(); ++c) {
      model.feature_min[c] = std::min(model.feature_min[c], X(i, c));
      model.feature_max[c] = std::max(model.feature_max[c], X(i, c));
    }
  for (std::size_t i = 0; i < X.rows(); ++i) model.max_abs_q2 = std::max(model.max_abs_q2, std::abs(X(i, 2)));

  if (cfg.normalize) {
    model.feature_norm = MinMaxNormalizer::fit(matrix_rows(X));
    model.target_norm = MinMaxNormalizer::fit(matrix_rows(Y));
    X = normalized(X, *model.feature_norm);
    Y = normalized(Y, *model.target_norm);
  }

  ParamGrid grid = cfg.grid();
  Hyperparams base;
  if (cfg.kind == ModelKind::decision_tree) {
    grid.n_estimators = {1};
    grid.bootstrap_fraction = {1.0};
    base.bootstrap = false;
  }

  std::vector<std::vector<std::size_t>> groups;
  if (cfg.multi_output) groups.push_back({0, 1, 2});
  else groups = {{0}, {1}, {2}};

  const std::uint64_t cv_seed = derive_seed(seed, 1);
  auto cv_meta = nlohmann::json::object();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    TargetModel m;
    for (auto c : groups[g]) m.outputs.emplace_back(kTargetNames[c]);
    m.name = cfg.multi_output ? "multi_output" : m.outputs.front();
    const Matrix Yg = Y.select_columns(groups[g]);
    base.seed = derive_seed(seed, 2 + g);
    auto search = grid_search(X, Yg, grid, base, cfg.folds, cv_seed, jobs);
    m.hp = search.best_hp();
    m.forest = fit_forest(X, Yg, m.hp, jobs);
    cv_meta[m.name] = {{"best_mean_nmae", search.rows[search.best].cv.mean}, {"cells", search.rows.size()}};
    result.searches.push_back({m.name, std::move(search)});
    model.members.push_back(std::move(m));
  }

  model.train_meta = {{"seed", seed},
                      {"tool_version", MRDESIGN_VERSION},
                      {"dataset_hash", ds.content_hash()},
                      {"n_samples", ds.size()},
                      {"n_train", train.size()},
                      {"test_indices", result.split.test},
                      {"train_config", cfg.to_json()},
                      {"cross_validation", cv_meta}};
  return result;
}

std::string TrainResult::grid_table_csv() const {
  std::string out;
  for (std::size_t i = 0; i < searches.size(); ++i)
    out += mrdesign::grid_table_csv(searches[i].target, searches[i].result, i == 0);
  return out;
}

MetricsReport evaluate_model(const Model& model, const Dataset& ds, const std::vector<std::size_t>& rows) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "nothing to evaluate");
  if (!(model.features == ds.features)) fail(ErrorCode::config, "dataset feature_config differs from the model's");
  MetricsReport report;
  report.rows = rows;
  report.targets.resize(model.targets.size());
  for (std::size_t t = 0; t < model.targets.size(); ++t) report.targets[t].name = model.targets[t];
  for (auto r : rows) {
    const auto& rec = ds.records.at(r);
    const auto pred = model.predict(rec.features);
    const auto act = rec.geometry.values();
    for (std::size_t t = 0; t < report.targets.size(); ++t) {
      report.targets[t].actual.push_back(act[t]);
      report.targets[t].predicted.push_back(pred[t]);
    }
  }
  for (auto& tm : report.targets) {
    tm.ape = absolute_percentage_errors(tm.actual, tm.predicted);
    tm.mape = mape(tm.actual, tm.predicted);
    tm.nmae = nmae(tm.actual, tm.predicted);
    tm.median_ape = median(tm.ape);
  }
  return report;
}

const TargetMetrics& MetricsReport::at(const std::string& name) const {
  for (const auto& t : targets)
    if (t.name == name) return t;
  fail(ErrorCode::invalid_argument, "no metrics for target '" + name + "'");
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json per_target = nlohmann::json::object();
  for (const auto& t : targets)
    per_target[t.name] = {{"mape_percent", t.mape}, {"nmae_um", t.nmae}, {"median_ape_percent", t.median_ape}};
  return {{"n_samples", rows.size()}, {"per_target", per_target}};
}

std::string MetricsReport::ape_csv() const {
  std::string out = "row,radius_um,width_um,height_um";
  for (const auto& t : targets) out += "," + t.name + "_pred";
  for (const auto& t : targets) out += "," + t.name + "_ape";
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += std::to_string(rows[i]);
    for (const auto& t : targets) out += ',' + format_e9(t.actual[i]);
    for (const auto& t : targets) out += ',' + format_e9(t.predicted[i]);
    for (const auto& t : targets) out += ',' + format_e9(t.ape[i]);
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> recorded_test_rows(const Model& model, const Dataset& ds) {
  const auto hash = model.train_meta.value("dataset_hash", std::string());
  if (hash != ds.content_hash())
    fail(ErrorCode::config, "dataset does not match the one the model was trained on (hash " + hash + ")");
  std::vector<std::size_t> rows;
  try {
    rows = model.train_meta.at("test_indices").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("model train_meta lacks test_indices: ") + e.what());
  }
  for (auto r : rows)
    if (r >= ds.size()) fail(ErrorCode::schema, "recorded test index out of range");
  return rows;
}

std::string nmae_vs_trees_csv(const Model& model, const Dataset& ds, const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& counts) {
  std::string out = "n_estimators";
  for (const auto& t : model.targets) out += "," + t + "_nmae";
  out += '\n';
  // Members with fewer trees contribute their whole forest.
  std::size_t limit = 0;
  for (const auto& m : model.members) limit = std::max(limit, m.forest.size());
  for (auto k : counts) {
    if (k == 0 || k > limit) continue;
    std::vector<std::vector<double>> act(model.targets.size()), pred(model.targets.size());
    for (auto r : rows) {
      const auto& rec = ds.records.at(r);
      const auto p = model.predict_prefix(rec.features, k);
      const auto a = rec.geometry.values();
      for (std::size_t t = 0; t < model.targets.size(); ++t) {
        act[t].push_back(a[t]);
        pred[t].push_back(p[t]);
      }
    }
    out += std::to_string(k);
    for (std::size_t t = 0; t < model.targets.size(); ++t) out += ',' + format_e9(nmae(act[t], pred[t]));
    out += '\n';
  }
  return out;
}

}  // namespace mrdesign
