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
#include <limits>

#include "common.hpp"
#include "model.hpp"

namespace mrdesign {

namespace {
constexpr const char* kMultiKey = "multi_output";
}

const char* to_string(ModelKind kind) {
  return kind == ModelKind::decision_tree ? "dt" : "rf";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "dt" || s == "decision_tree") return ModelKind::decision_tree;
  if (s == "rf" || s == "random_forest") return ModelKind::random_forest;
  fail(ErrorCode::config, "unknown model kind '" + s + "' (expected rf or dt)");
}

std::vector<double> Model::predict_prefix(const std::vector<double>& features, std::size_t k) const {
  if (members.empty()) fail(ErrorCode::invalid_argument, "model has no members");
  if (features.size() != this->features.size())
    fail(ErrorCode::invalid_argument, "model expects " + std::to_string(this->features.size()) + " features, got " +
                                          std::to_string(features.size()));
  const auto x = feature_norm ? feature_norm->apply(features) : features;
  std::vector<double> y(targets.size(), 0.0);
  for (const auto& m : members) {
    const auto p = m.forest.predict_prefix(x, std::min(k, m.forest.size()));
    for (std::size_t o = 0; o < m.outputs.size(); ++o) {
      const auto it = std::find(targets.begin(), targets.end(), m.outputs[o]);
      y[static_cast<std::size_t>(it - targets.begin())] = p[o];
    }
  }
  return target_norm ? target_norm->invert(y) : y;
}

std::vector<double> Model::predict(const std::vector<double>& features) const {
  return predict_prefix(features, std::numeric_limits<std::size_t>::max());
}

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json per_target = nlohmann::json::object();
  for (const auto& m : model.members) {
    auto trees = nlohmann::json::array();
    for (const auto& t : m.forest.trees()) trees.push_back(t.to_json());
    per_target[m.name] = {{"outputs", m.outputs}, {"hyperparams", m.hp.to_json()}, {"trees", trees}};
  }
  nlohmann::json normalizer = nullptr;
  if (model.feature_norm && model.target_norm)
    normalizer = {{"features", model.feature_norm->to_json()}, {"targets", model.target_norm->to_json()}};
  auto meta = model.train_meta;
  meta["feature_range"] = {{"min", model.feature_min}, {"max", model.feature_max}};
  meta["max_abs_q2_hz"] = model.max_abs_q2;
  return {{"schema_version", kModelSchemaVersion},
          {"kind", to_string(model.kind)},
          {"targets", model.targets},
          {"per_target", per_target},
          {"feature_config", model.features.to_json()},
          {"normalizer", normalizer},
          {"train_meta", meta}};
}

Model model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) fail(ErrorCode::schema, "model document is not an object");
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      fail(ErrorCode::schema, "unsupported model schema_version");
    Model model;
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.targets = j.at("targets").get<std::vector<std::string>>();
    if (model.targets.empty()) fail(ErrorCode::schema, "model lists no targets");
    model.features = FeatureConfig::from_json(j.at("feature_config"));

    const auto& norm = j.at("normalizer");
    if (!norm.is_null()) {
      model.feature_norm = MinMaxNormalizer::from_json(norm.at("features"));
      model.target_norm = MinMaxNormalizer::from_json(norm.at("targets"));
      if (model.feature_norm->size() != model.features.size() || model.target_norm->size() != model.targets.size())
        fail(ErrorCode::schema, "normalizer dimensions do not match the model");
    }

    const auto& per_target = j.at("per_target");
    std::vector<std::string> keys;
    if (per_target.contains(kMultiKey)) keys = {kMultiKey};
    else keys = model.targets;
    if (per_target.size() != keys.size()) fail(ErrorCode::schema, "per_target does not match targets");
    for (const auto& key : keys) {
      const auto& entry = per_target.at(key);
      TargetModel m;
      m.name = key;
      m.outputs = entry.at("outputs").get<std::vector<std::string>>();
      for (const auto& o : m.outputs)
        if (std::find(model.targets.begin(), model.targets.end(), o) == model.targets.end())
          fail(ErrorCode::schema, "member output '" + o + "' is not a model target");
      m.hp = Hyperparams::from_json(entry.at("hyperparams"));
      std::vector<RegressionTree> trees;
      for (const auto& t : entry.at("trees"))
        trees.push_back(RegressionTree::from_json(t, model.features.size(), m.outputs.size()));
      if (trees.empty()) fail(ErrorCode::schema, "member '" + key + "' has no trees");
      m.forest = Forest(std::move(trees));
      model.members.push_back(std::move(m));
    }

    model.train_meta = j.at("train_meta");
    const auto& range = model.train_meta.at("feature_range");
    model.feature_min = range.at("min").get<std::vector<double>>();
    model.feature_max = range.at("max").get<std::vector<double>>();
    if (model.feature_min.size() != model.features.size() || model.feature_max.size() != model.features.size())
      fail(ErrorCode::schema, "feature_range does not match feature_config");
    model.max_abs_q2 = model.train_meta.at("max_abs_q2_hz").get<double>();
    model.train_meta.erase("feature_range");
    model.train_meta.erase("max_abs_q2_hz");
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("malformed model: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  write_text_file(path, model_to_json(model).dump() + "\n");
}

Model load_model(const std::string& path) {
  const auto text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, path + ": not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace mrdesign
