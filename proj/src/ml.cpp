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
#include "ml.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "common.hpp"

namespace mrdesign {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) fail(ErrorCode::invalid_argument, "ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.cols_));
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= rows_) fail(ErrorCode::invalid_argument, "row index out of range");
    std::copy(row(idx[r]), row(idx[r]) + cols_, out.data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
  }
  return out;
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    if (idx[c] >= cols_) fail(ErrorCode::invalid_argument, "column index out of range");
    for (std::size_t i = 0; i < rows_; ++i) out(i, c) = (*this)(i, idx[c]);
  }
  return out;
}

// ---------------------------------------------------------------- hyperparams

void Hyperparams::validate() const {
  if (max_depth && *max_depth < 1) fail(ErrorCode::config, "max_depth must be >= 1 or unlimited");
  if (min_samples_leaf < 1) fail(ErrorCode::config, "min_samples_leaf must be >= 1");
  if (n_estimators < 1) fail(ErrorCode::config, "n_estimators must be >= 1");
  if (!(bootstrap_fraction > 0.0 && bootstrap_fraction <= 1.0))
    fail(ErrorCode::config, "bootstrap_fraction must lie in (0, 1]");
  if (max_features && *max_features < 1) fail(ErrorCode::config, "max_features must be >= 1 or \"all\"");
}

namespace {

nlohmann::json optional_int_json(const std::optional<int>& v, const char* none) {
  if (v) return *v;
  return none ? nlohmann::json(none) : nlohmann::json(nullptr);
}

std::optional<int> optional_int_from(const nlohmann::json& j, const char* what) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "all" || s == "unlimited" || s == "none") return std::nullopt;
    fail(ErrorCode::config, std::string(what) + ": unexpected value '" + s + "'");
  }
  if (!j.is_number_integer()) fail(ErrorCode::config, std::string(what) + " must be an integer");
  return j.get<int>();
}

}  // namespace

nlohmann::json Hyperparams::to_json() const {
  return {{"max_depth", optional_int_json(max_depth, nullptr)},
          {"min_samples_leaf", min_samples_leaf},
          {"n_estimators", n_estimators},
          {"bootstrap", bootstrap},
          {"bootstrap_fraction", bootstrap_fraction},
          {"max_features", optional_int_json(max_features, "all")},
          {"seed", seed}};
}

Hyperparams Hyperparams::from_json(const nlohmann::json& j) {
  try {
    Hyperparams hp;
    hp.max_depth = optional_int_from(j.at("max_depth"), "max_depth");
    hp.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    hp.n_estimators = j.at("n_estimators").get<int>();
    hp.bootstrap = j.at("bootstrap").get<bool>();
    hp.bootstrap_fraction = j.at("bootstrap_fraction").get<double>();
    hp.max_features = optional_int_from(j.at("max_features"), "max_features");
    hp.seed = j.at("seed").get<std::uint64_t>();
    hp.validate();
    return hp;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("malformed hyperparams: ") + e.what());
  }
}

// ---------------------------------------------------------------- tree

int RegressionTree::add_leaf(const double* mean) {
  Node n;
  n.value = values_.size();
  values_.insert(values_.end(), mean, mean + n_outputs_);
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size() - 1);
}

int RegressionTree::add_split(int feature, double threshold) {
  Node n;
  n.feature = feature;
  n.threshold = threshold;
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size() - 1);
}

void RegressionTree::link(int node, int left, int right) {
  nodes_[node].left = left;
  nodes_[node].right = right;
}

int RegressionTree::leaf_of(const double* x) const {
  int i = 0;
  while (nodes_[i].feature >= 0) i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return i;
}

void RegressionTree::predict_into(const double* x, double* out) const {
  const auto& leaf = nodes_[leaf_of(x)];
  std::copy(values_.begin() + static_cast<std::ptrdiff_t>(leaf.value),
            values_.begin() + static_cast<std::ptrdiff_t>(leaf.value + n_outputs_), out);
}

std::vector<double> RegressionTree::predict(const std::vector<double>& x) const {
  if (nodes_.empty()) fail(ErrorCode::invalid_argument, "predict on an empty tree");
  if (x.size() != n_features_) fail(ErrorCode::invalid_argument, "feature dimension mismatch");
  std::vector<double> out(n_outputs_);
  predict_into(x.data(), out.data());
  return out;
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return best;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

nlohmann::json RegressionTree::to_json() const {
  if (nodes_.empty()) fail(ErrorCode::invalid_argument, "cannot serialize an empty tree");
  std::function<nlohmann::json(int)> emit = [&](int i) -> nlohmann::json {
    const auto& n = nodes_[i];
    if (n.feature < 0) {
      return {{"leaf", std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(n.value),
                                           values_.begin() + static_cast<std::ptrdiff_t>(n.value + n_outputs_))}};
    }
    return {{"f", n.feature}, {"t", n.threshold}, {"l", emit(n.left)}, {"r", emit(n.right)}};
  };
  return emit(0);
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j, std::size_t n_features, std::size_t n_outputs) {
  RegressionTree tree(n_features, n_outputs);
  std::function<int(const nlohmann::json&, int)> parse = [&](const nlohmann::json& node, int depth) -> int {
    if (depth > 100000) fail(ErrorCode::schema, "tree too deep");
    if (!node.is_object()) fail(ErrorCode::schema, "tree node is not an object");
    if (node.contains("leaf")) {
      const auto v = node.at("leaf").get<std::vector<double>>();
      if (v.size() != n_outputs || node.size() != 1) fail(ErrorCode::schema, "malformed tree leaf");
      return tree.add_leaf(v.data());
    }
    if (node.size() != 4) fail(ErrorCode::schema, "split node needs exactly f, t, l, r");
    const int f = node.at("f").get<int>();
    if (f < 0 || static_cast<std::size_t>(f) >= n_features) fail(ErrorCode::schema, "split feature out of range");
    const double t = node.at("t").get<double>();
    if (!std::isfinite(t)) fail(ErrorCode::schema, "non-finite split threshold");
    const int id = tree.add_split(f, t);
    const int l = parse(node.at("l"), depth + 1);
    const int r = parse(node.at("r"), depth + 1);
    tree.link(id, l, r);
    return id;
  };
  try {
    parse(j, 0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("malformed tree: ") + e.what());
  }
  return tree;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Matrix& Y, const Hyperparams& hp, std::uint64_t seed)
      : X_(X), Y_(Y), hp_(hp), rng_(seed), tree_(X.cols(), Y.cols()), mean_(Y.cols()) {}

  RegressionTree build(std::vector<std::size_t> sample) {
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  struct Best {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double sse = 0.0;
  };

  int grow(std::vector<std::size_t>& rows, int depth) {
    const std::size_t n = rows.size();
    const std::size_t n_out = Y_.cols();
    // Offset from the first row: a constant node returns its value exactly.
    for (std::size_t o = 0; o < n_out; ++o) {
      const double anchor = Y_(rows.front(), o);
      double s = 0.0;
      for (auto r : rows) s += Y_(r, o) - anchor;
      mean_[o] = anchor + s / static_cast<double>(n);
    }

    const bool depth_left = !hp_.max_depth || depth < *hp_.max_depth;
    const auto msl = static_cast<std::size_t>(hp_.min_samples_leaf);
    if (!depth_left || n < 2 * msl || constant_targets(rows)) return tree_.add_leaf(mean_.data());

    const auto node_mean = mean_;
    const Best best = find_split(rows, node_mean);
    if (!best.found) return tree_.add_leaf(node_mean.data());

    std::vector<std::size_t> left, right;
    for (auto r : rows) (X_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int id = tree_.add_split(best.feature, best.threshold);
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.link(id, l, r);
    return id;
  }

  bool constant_targets(const std::vector<std::size_t>& rows) const {
    for (std::size_t o = 0; o < Y_.cols(); ++o) {
      const double y0 = Y_(rows.front(), o);
      for (auto r : rows)
        if (Y_(r, o) != y0) return false;
    }
    return true;
  }

  std::vector<int> candidate_features() {
    const int nf = static_cast<int>(X_.cols());
    std::vector<int> features(nf);
    std::iota(features.begin(), features.end(), 0);
    if (hp_.max_features && *hp_.max_features < nf) {
      const int k = *hp_.max_features;
      for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(nf - i)));
        std::swap(features[i], features[j]);
      }
      features.resize(k);
      std::sort(features.begin(), features.end());
    }
    return features;
  }

  Best find_split(const std::vector<std::size_t>& rows, const std::vector<double>& mean) {
    const std::size_t n = rows.size();
    const std::size_t n_out = Y_.cols();
    const auto msl = static_cast<std::size_t>(hp_.min_samples_leaf);

    // Centred targets keep the prefix-sum variance formula well conditioned.
    std::vector<double> total_sum(n_out, 0.0), total_sq(n_out, 0.0);
    for (auto r : rows)
      for (std::size_t o = 0; o < n_out; ++o) {
        const double d = Y_(r, o) - mean[o];
        total_sum[o] += d;
        total_sq[o] += d * d;
      }
    double node_sse = 0.0;
    for (std::size_t o = 0; o < n_out; ++o) node_sse += total_sq[o] - total_sum[o] * total_sum[o] / n;
    const double tol = 1e-12 * std::abs(node_sse);

    Best best;
    std::vector<std::size_t> order(rows);
    std::vector<double> left_sum(n_out), left_sq(n_out);
    for (int f : candidate_features()) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return X_(a, f) < X_(b, f); });
      std::fill(left_sum.begin(), left_sum.end(), 0.0);
      std::fill(left_sq.begin(), left_sq.end(), 0.0);
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t o = 0; o < n_out; ++o) {
          const double d = Y_(order[p], o) - mean[o];
          left_sum[o] += d;
          left_sq[o] += d * d;
        }
        const double a = X_(order[p], f);
        const double b = X_(order[p + 1], f);
        if (!(a < b)) continue;
        const std::size_t nl = p + 1, nr = n - nl;
        if (nl < msl || nr < msl) continue;
        double sse = 0.0;
        for (std::size_t o = 0; o < n_out; ++o) {
          const double rs = total_sum[o] - left_sum[o];
          const double rq = total_sq[o] - left_sq[o];
          sse += left_sq[o] - left_sum[o] * left_sum[o] / nl + rq - rs * rs / nr;
        }
        if (!best.found || sse < best.sse - tol) {
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = {true, f, t, sse};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const Matrix& Y_;
  const Hyperparams& hp_;
  std::mt19937_64 rng_;
  RegressionTree tree_;
  std::vector<double> mean_;
};

void check_training_data(const Matrix& X, const Matrix& Y) {
  if (X.rows() == 0) fail(ErrorCode::invalid_argument, "empty training set");
  if (X.rows() != Y.rows()) fail(ErrorCode::invalid_argument, "feature and target row counts differ");
  if (X.cols() == 0 || Y.cols() == 0) fail(ErrorCode::invalid_argument, "zero feature or target columns");
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

RegressionTree fit_tree(const Matrix& X, const Matrix& Y, const Hyperparams& hp,
                        const std::vector<std::size_t>& sample, std::uint64_t rng_seed) {
  check_training_data(X, Y);
  hp.validate();
  if (sample.empty()) fail(ErrorCode::invalid_argument, "empty training sample");
  for (auto i : sample)
    if (i >= X.rows()) fail(ErrorCode::invalid_argument, "sample index out of range");
  return TreeBuilder(X, Y, hp, rng_seed).build(sample);
}

RegressionTree fit_tree(const Matrix& X, const Matrix& Y, const Hyperparams& hp) {
  check_training_data(X, Y);
  return fit_tree(X, Y, hp, all_rows(X.rows()), hp.seed);
}

// ---------------------------------------------------------------- forest

Forest::Forest(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) fail(ErrorCode::invalid_argument, "forest needs at least one tree");
  for (const auto& t : trees_)
    if (t.n_features() != trees_.front().n_features() || t.n_outputs() != trees_.front().n_outputs())
      fail(ErrorCode::schema, "forest trees disagree on dimensions");
}

std::vector<double> Forest::predict_prefix(const std::vector<double>& x, std::size_t k) const {
  if (trees_.empty()) fail(ErrorCode::invalid_argument, "predict on an empty forest");
  if (k == 0 || k > trees_.size()) fail(ErrorCode::invalid_argument, "tree prefix out of range");
  if (x.size() != trees_.front().n_features()) fail(ErrorCode::invalid_argument, "feature dimension mismatch");
  const std::size_t n_out = trees_.front().n_outputs();
  std::vector<double> sum(n_out, 0.0), one(n_out);
  for (std::size_t t = 0; t < k; ++t) {
    trees_[t].predict_into(x.data(), one.data());
    for (std::size_t o = 0; o < n_out; ++o) sum[o] += one[o];
  }
  for (auto& s : sum) s /= static_cast<double>(k);
  return sum;
}

std::vector<double> Forest::predict(const std::vector<double>& x) const { return predict_prefix(x, trees_.size()); }

Matrix Forest::predict(const Matrix& X) const {
  if (trees_.empty()) fail(ErrorCode::invalid_argument, "predict on an empty forest");
  Matrix out(X.rows(), trees_.front().n_outputs());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto p = predict(X.row_vector(i));
    for (std::size_t o = 0; o < p.size(); ++o) out(i, o) = p[o];
  }
  return out;
}

Forest fit_forest(const Matrix& X, const Matrix& Y, const Hyperparams& hp, int jobs) {
  check_training_data(X, Y);
  hp.validate();
  const std::size_t n = X.rows();
  std::vector<RegressionTree> trees(static_cast<std::size_t>(hp.n_estimators));
  parallel_for(trees.size(), jobs, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(hp.seed, t));
    std::vector<std::size_t> sample;
    if (hp.bootstrap) {
      const auto draws = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hp.bootstrap_fraction * n)));
      sample.resize(draws);
      for (auto& s : sample) s = static_cast<std::size_t>(uniform_below(rng, n));
    } else {
      sample = all_rows(n);
    }
    trees[t] = fit_tree(X, Y, hp, sample, rng());
  });
  return Forest(std::move(trees));
}

// ---------------------------------------------------------------- metrics

namespace {
void check_pair(const std::vector<double>& a, const std::vector<double>& p) {
  if (a.empty()) fail(ErrorCode::invalid_argument, "metric over zero samples");
  if (a.size() != p.size()) fail(ErrorCode::invalid_argument, "actual and predicted lengths differ");
}
}  // namespace

std::vector<double> absolute_percentage_errors(const std::vector<double>& actual,
                                               const std::vector<double>& predicted) {
  check_pair(actual, predicted);
  std::vector<double> out(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) fail(ErrorCode::domain, "percentage error with a zero actual value");
    out[i] = std::abs((predicted[i] - actual[i]) / actual[i]) * 100.0;
  }
  return out;
}

double mape(const std::vector<double>& actual, const std::vector<double>& predicted) {
  const auto ape = absolute_percentage_errors(actual, predicted);
  double s = 0.0;
  for (double v : ape) s += v;
  return s / static_cast<double>(ape.size());
}

double nmae(const std::vector<double>& actual, const std::vector<double>& predicted) {
  check_pair(actual, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) s += std::abs(predicted[i] - actual[i]);
  return -s / static_cast<double>(actual.size());
}

double median(std::vector<double> v) {
  if (v.empty()) fail(ErrorCode::invalid_argument, "median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

// ---------------------------------------------------------------- cv

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::invalid_argument, "k-fold needs k >= 2");
  if (k > n) fail(ErrorCode::invalid_argument, "k-fold needs k <= N");
  auto idx = all_rows(n);
  std::mt19937_64 rng(seed);
  shuffle_indices(idx, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

namespace {

double fold_score(const Matrix& X, const Matrix& Y, const Hyperparams& hp,
                  const std::vector<std::vector<std::size_t>>& folds, std::size_t held) {
  std::vector<std::size_t> train;
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (f != held) train.insert(train.end(), folds[f].begin(), folds[f].end());
  const auto forest = fit_forest(X.select_rows(train), Y.select_rows(train), hp, 1);
  std::vector<double> actual, predicted;
  for (auto i : folds[held]) {
    const auto p = forest.predict(X.row_vector(i));
    for (std::size_t o = 0; o < p.size(); ++o) {
      actual.push_back(Y(i, o));
      predicted.push_back(p[o]);
    }
  }
  return nmae(actual, predicted);
}

CvReport summarize(std::vector<double> scores) {
  CvReport r;
  double s = 0.0;
  for (double v : scores) s += v;
  r.mean = s / static_cast<double>(scores.size());
  r.fold_scores = std::move(scores);
  return r;
}

}  // namespace

CvReport cross_validate(const Matrix& X, const Matrix& Y, const Hyperparams& hp, std::size_t k, std::uint64_t seed) {
  check_training_data(X, Y);
  const auto folds = kfold_indices(X.rows(), k, seed);
  std::vector<double> scores(k);
  for (std::size_t f = 0; f < k; ++f) scores[f] = fold_score(X, Y, hp, folds, f);
  return summarize(std::move(scores));
}

// ---------------------------------------------------------------- grid

std::vector<Hyperparams> ParamGrid::cells(const Hyperparams& base) const {
  validate();
  std::vector<Hyperparams> out;
  for (const auto& d : max_depth)
    for (int leaf : min_samples_leaf)
      for (int est : n_estimators)
        for (double frac : bootstrap_fraction)
          for (const auto& mf : max_features) {
            Hyperparams hp = base;
            hp.max_depth = d;
            hp.min_samples_leaf = leaf;
            hp.n_estimators = est;
            hp.bootstrap_fraction = frac;
            hp.max_features = mf;
            hp.validate();
            out.push_back(hp);
          }
  return out;
}

void ParamGrid::validate() const {
  if (max_depth.empty() || min_samples_leaf.empty() || n_estimators.empty() || bootstrap_fraction.empty() ||
      max_features.empty())
    fail(ErrorCode::config, "every param_grid axis needs at least one value");
}

nlohmann::json ParamGrid::to_json() const {
  auto depth = nlohmann::json::array();
  for (const auto& d : max_depth) depth.push_back(optional_int_json(d, nullptr));
  auto feats = nlohmann::json::array();
  for (const auto& f : max_features) feats.push_back(optional_int_json(f, "all"));
  return {{"max_depth", depth},
          {"min_samples_leaf", min_samples_leaf},
          {"n_estimators", n_estimators},
          {"bootstrap_fraction", bootstrap_fraction},
          {"max_features", feats}};
}

ParamGrid ParamGrid::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::config, "param_grid must be an object");
  ParamGrid g;
  try {
    for (const auto& [key, value] : j.items()) {
      if (!value.is_array()) fail(ErrorCode::config, "param_grid." + key + " must be an array");
      if (key == "max_depth") {
        g.max_depth.clear();
        for (const auto& v : value) g.max_depth.push_back(optional_int_from(v, "max_depth"));
      } else if (key == "min_samples_leaf") {
        g.min_samples_leaf = value.get<std::vector<int>>();
      } else if (key == "n_estimators") {
        g.n_estimators = value.get<std::vector<int>>();
      } else if (key == "bootstrap_fraction") {
        g.bootstrap_fraction = value.get<std::vector<double>>();
      } else if (key == "max_features") {
        g.max_features.clear();
        for (const auto& v : value) g.max_features.push_back(optional_int_from(v, "max_features"));
      } else {
        fail(ErrorCode::config, "unknown param_grid key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::config, std::string("malformed param_grid: ") + e.what());
  }
  g.validate();
  return g;
}

GridSearchResult grid_search(const Matrix& X, const Matrix& Y, const ParamGrid& grid, const Hyperparams& base,
                             std::size_t k, std::uint64_t seed, int jobs) {
  check_training_data(X, Y);
  const auto cells = grid.cells(base);
  const auto folds = kfold_indices(X.rows(), k, seed);
  std::vector<double> scores(cells.size() * k);
  parallel_for(scores.size(), jobs, [&](std::size_t task) {
    scores[task] = fold_score(X, Y, cells[task / k], folds, task % k);
  });

  GridSearchResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> s(scores.begin() + static_cast<std::ptrdiff_t>(c * k),
                          scores.begin() + static_cast<std::ptrdiff_t>((c + 1) * k));
    result.rows.push_back({cells[c], summarize(std::move(s))});
    if (result.rows[c].cv.mean > result.rows[result.best].cv.mean) result.best = c;
  }
  return result;
}

std::string grid_table_csv(const std::string& target, const GridSearchResult& result, bool with_header) {
  std::string out;
  const std::size_t k = result.rows.empty() ? 0 : result.rows.front().cv.fold_scores.size();
  if (with_header) {
    out = "target,max_depth,min_samples_leaf,n_estimators,bootstrap_fraction,max_features";
    for (std::size_t f = 0; f < k; ++f) out += ",fold_" + std::to_string(f + 1);
    out += ",mean,best\n";
  }
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    out += target + ',' + (row.hp.max_depth ? std::to_string(*row.hp.max_depth) : std::string("unlimited")) + ',' +
           std::to_string(row.hp.min_samples_leaf) + ',' + std::to_string(row.hp.n_estimators) + ',' +
           format_exact(row.hp.bootstrap_fraction) + ',' +
           (row.hp.max_features ? std::to_string(*row.hp.max_features) : std::string("all"));
    for (double s : row.cv.fold_scores) out += ',' + format_e9(s);
    out += ',' + format_e9(row.cv.mean) + ',' + (i == result.best ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace mrdesign
