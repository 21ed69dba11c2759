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
#ifndef MRDESIGN_MODEL_HPP
#define MRDESIGN_MODEL_HPP

// Geometry regressors built on ml.hpp, their JSON form, and the
// train/evaluate pipeline over a Dataset.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "ml.hpp"

namespace mrdesign {

inline constexpr int kModelSchemaVersion = 1;

enum class ModelKind { decision_tree, random_forest };
const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// One forest predicting `outputs` (a single target unless multi-output).
struct TargetModel {
  std::string name;
  std::vector<std::string> outputs;
  Hyperparams hp;
  Forest forest;
};

struct Model {
  ModelKind kind = ModelKind::random_forest;
  std::vector<std::string> targets{kTargetNames.begin(), kTargetNames.end()};
  std::vector<TargetModel> members;
  FeatureConfig features;
  std::optional<MinMaxNormalizer> feature_norm;
  std::optional<MinMaxNormalizer> target_norm;
  // Raw feature range and largest |q2| seen in training.
  std::vector<double> feature_min, feature_max;
  double max_abs_q2 = 0.0;
  nlohmann::json train_meta = nlohmann::json::object();

  // Raw features in, raw targets (µm) out.
  std::vector<double> predict(const std::vector<double>& features) const;
  // Same, but averaging only the first k trees of every member (all of a
  // member's trees when it has fewer).
  std::vector<double> predict_prefix(const std::vector<double>& features, std::size_t k) const;
  bool multi_output() const { return members.size() == 1 && targets.size() > 1; }
};

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

struct TrainConfig {
  ModelKind kind = ModelKind::random_forest;
  bool normalize = false;
  bool multi_output = false;
  double split_ratio = 0.75;
  std::size_t folds = 4;
  std::optional<ParamGrid> param_grid;  // nullopt = default_grid(kind)

  static ParamGrid default_grid(ModelKind kind);
  ParamGrid grid() const { return param_grid ? *param_grid : default_grid(kind); }
  nlohmann::json to_json() const;
};

struct TargetSearch {
  std::string target;
  GridSearchResult result;
};

struct TrainResult {
  Model model;
  Split split;
  std::vector<TargetSearch> searches;

  std::string grid_table_csv() const;
};

// Streams derived from `seed`: 0 split, 1 cross-validation folds, 2 + i
// forest seed of member i.
TrainResult train_model(const Dataset& ds, const TrainConfig& cfg, std::uint64_t seed, int jobs = 0);

Matrix feature_matrix(const Dataset& ds, const std::vector<std::size_t>& rows);
Matrix target_matrix(const Dataset& ds, const std::vector<std::size_t>& rows);

struct TargetMetrics {
  std::string name;
  double mape = 0.0;
  double nmae = 0.0;
  double median_ape = 0.0;
  std::vector<double> actual, predicted, ape;
};

struct MetricsReport {
  std::vector<TargetMetrics> targets;
  std::vector<std::size_t> rows;  // dataset rows evaluated

  nlohmann::json to_json() const;
  // row,radius_um,width_um,height_um,<target>_pred...,<target>_ape...
  std::string ape_csv() const;
  const TargetMetrics& at(const std::string& name) const;
};

MetricsReport evaluate_model(const Model& model, const Dataset& ds, const std::vector<std::size_t>& rows);

// Test rows recorded in the model's train_meta; checks the dataset hash.
std::vector<std::size_t> recorded_test_rows(const Model& model, const Dataset& ds);

// n_estimators,<target>_nmae... using tree prefixes of the model's forests.
std::string nmae_vs_trees_csv(const Model& model, const Dataset& ds, const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& counts);

}  // namespace mrdesign

#endif
