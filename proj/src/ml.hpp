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
#ifndef MRDESIGN_ML_HPP
#define MRDESIGN_ML_HPP

// CART regression trees, bagged forests, metrics and a k-fold grid search.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mrdesign {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::vector<double> row_vector(std::size_t i) const { return {row(i), row(i) + cols_}; }
  std::vector<double> column(std::size_t j) const;
  Matrix select_rows(const std::vector<std::size_t>& idx) const;
  Matrix select_columns(const std::vector<std::size_t>& idx) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct Hyperparams {
  std::optional<int> max_depth;  // nullopt = unlimited
  int min_samples_leaf = 1;
  int n_estimators = 1;
  bool bootstrap = true;
  double bootstrap_fraction = 1.0;
  std::optional<int> max_features;  // nullopt = all
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static Hyperparams from_json(const nlohmann::json& j);
  bool operator==(const Hyperparams&) const = default;
};

class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    std::size_t value = 0;  // offset into values() for leaves
  };

  RegressionTree() = default;
  RegressionTree(std::size_t n_features, std::size_t n_outputs) : n_features_(n_features), n_outputs_(n_outputs) {}

  std::vector<double> predict(const std::vector<double>& x) const;
  void predict_into(const double* x, double* out) const;  // no checks, adds nothing
  std::size_t n_features() const { return n_features_; }
  std::size_t n_outputs() const { return n_outputs_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  int depth() const;
  std::size_t leaf_count() const;
  // Index of the leaf that x lands in.
  int leaf_of(const double* x) const;

  nlohmann::json to_json() const;
  static RegressionTree from_json(const nlohmann::json& j, std::size_t n_features, std::size_t n_outputs);

  // Used by the builder.
  int add_leaf(const double* mean);
  int add_split(int feature, double threshold);
  void link(int node, int left, int right);

 private:
  std::size_t n_features_ = 0, n_outputs_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> values_;
};

// Greedy CART on the rows `sample` (duplicates allowed, as for a bootstrap
// draw). Split scores are summed squared deviations of the children over all
// outputs; candidate thresholds are midpoints of consecutive distinct values;
// x <= threshold goes left. Scores within a relative 1e-12 of the best count
// as tied, and ties go to the lowest feature index, then the lowest
// threshold. `rng_seed` only matters when max_features < n_features.
RegressionTree fit_tree(const Matrix& X, const Matrix& Y, const Hyperparams& hp,
                        const std::vector<std::size_t>& sample, std::uint64_t rng_seed = 0);
RegressionTree fit_tree(const Matrix& X, const Matrix& Y, const Hyperparams& hp);

class Forest {
 public:
  Forest() = default;
  explicit Forest(std::vector<RegressionTree> trees);

  // Sum of tree predictions in tree order, divided by the count.
  std::vector<double> predict(const std::vector<double>& x) const;
  // Mean over the first k trees only.
  std::vector<double> predict_prefix(const std::vector<double>& x, std::size_t k) const;
  Matrix predict(const Matrix& X) const;
  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::size_t size() const { return trees_.size(); }

 private:
  std::vector<RegressionTree> trees_;
};

// Tree i is grown from mt19937_64(derive_seed(hp.seed, i)): first the
// bootstrap draw of round(fraction * N) rows with replacement, then any
// feature subsampling. With bootstrap off every tree sees all rows once.
Forest fit_forest(const Matrix& X, const Matrix& Y, const Hyperparams& hp, int jobs = 1);

// Percent. Throws on a zero actual value.
double mape(const std::vector<double>& actual, const std::vector<double>& predicted);
std::vector<double> absolute_percentage_errors(const std::vector<double>& actual,
                                               const std::vector<double>& predicted);
// -mean |predicted - actual|
double nmae(const std::vector<double>& actual, const std::vector<double>& predicted);
double median(std::vector<double> v);

// Shuffled with mt19937_64(seed), then cut into k contiguous folds; the
// first N mod k folds get the extra sample.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

struct CvReport {
  std::vector<double> fold_scores;
  double mean = 0.0;
};

// NMAE over all outputs of Y, fitting a forest on k-1 folds and scoring on
// the held one.
CvReport cross_validate(const Matrix& X, const Matrix& Y, const Hyperparams& hp, std::size_t k, std::uint64_t seed);

struct ParamGrid {
  std::vector<std::optional<int>> max_depth{std::nullopt};
  std::vector<int> min_samples_leaf{1};
  std::vector<int> n_estimators{1};
  std::vector<double> bootstrap_fraction{1.0};
  std::vector<std::optional<int>> max_features{std::nullopt};

  // depth, min_samples_leaf, n_estimators, bootstrap_fraction, max_features;
  // the last varies fastest.
  std::vector<Hyperparams> cells(const Hyperparams& base) const;
  void validate() const;
  nlohmann::json to_json() const;
  static ParamGrid from_json(const nlohmann::json& j);
};

struct GridRow {
  Hyperparams hp;
  CvReport cv;
};

struct GridSearchResult {
  std::vector<GridRow> rows;
  std::size_t best = 0;
  const Hyperparams& best_hp() const { return rows[best].hp; }
};

// Exhaustive search; best is the highest mean NMAE and the first cell wins a
// tie. Cells and folds run in parallel, each fit single threaded.
GridSearchResult grid_search(const Matrix& X, const Matrix& Y, const ParamGrid& grid, const Hyperparams& base,
                             std::size_t k, std::uint64_t seed, int jobs = 1);

// target,max_depth,min_samples_leaf,n_estimators,bootstrap_fraction,max_features,fold_1..fold_k,mean
std::string grid_table_csv(const std::string& target, const GridSearchResult& result, bool with_header = true);

}  // namespace mrdesign

#endif
