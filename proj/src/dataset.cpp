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
#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <tuple>

#include "common.hpp"
#include "run_config.hpp"

namespace mrdesign {

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) fail(ErrorCode::config, std::string("grid axis '") + name + "' is empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i]) || !(axis[i] > 0.0))
      fail(ErrorCode::config, std::string("grid axis '") + name + "' has non-positive values");
    if (i > 0 && !(axis[i] > axis[i - 1]))
      fail(ErrorCode::config, std::string("grid axis '") + name + "' is not strictly increasing");
  }
}

}  // namespace

void GridSpec::validate() const {
  check_axis(radii_um, "radii_um");
  check_axis(widths_um, "widths_um");
  check_axis(heights_um, "heights_um");
}

nlohmann::json GridSpec::to_json() const {
  return {{"radii_um", radii_um}, {"widths_um", widths_um}, {"heights_um", heights_um}};
}

std::vector<double> axis_range(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) fail(ErrorCode::config, "axis range needs step > 0 and stop >= start");
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-6)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (long long i = 0; i < count; ++i) out.push_back(std::round((start + i * step) * 1e9) / 1e9);
  return out;
}

GridSpec GridSpec::reference_grid() {
  return {axis_range(30.0, 130.0, 20.0), axis_range(1.0, 2.0, 0.1), axis_range(0.5, 0.8, 0.05)};
}

ResonatorSpec resonator_for(const Geometry& g, const ForwardConfig& forward) {
  ResonatorSpec spec;
  spec.radius_um = g.radius_um;
  spec.width_um = g.width_um;
  spec.height_um = g.height_um;
  spec.core_material = forward.mode.core_material;
  spec.clad_material = forward.mode.clad_material;
  return spec;
}

std::vector<Geometry> enumerate_grid(const GridSpec& spec) {
  spec.validate();
  std::vector<Geometry> out;
  out.reserve(spec.size());
  for (double r : spec.radii_um)
    for (double w : spec.widths_um)
      for (double h : spec.heights_um) out.push_back({r, w, h});
  return out;
}

std::vector<std::string> FeatureConfig::names() const {
  std::vector<std::string> out = {"q0_hz", "q1_hz", "q2_hz"};
  if (include_d1) out.emplace_back("d1_hz");
  return out;
}

nlohmann::json FeatureConfig::to_json() const {
  return {{"kind", "quadratic_fit"},
          {"window_um", {window.lo_um, window.hi_um}},
          {"include_d1", include_d1},
          {"names", names()}};
}

FeatureConfig FeatureConfig::from_json(const nlohmann::json& j) {
  try {
    if (j.value("kind", std::string("quadratic_fit")) != "quadratic_fit")
      fail(ErrorCode::schema, "unsupported feature kind '" + j.at("kind").get<std::string>() + "'");
    FeatureConfig cfg;
    const auto& w = j.at("window_um");
    if (!w.is_array() || w.size() != 2) fail(ErrorCode::schema, "feature window_um must be [lo, hi]");
    cfg.window = {w[0].get<double>(), w[1].get<double>()};
    cfg.include_d1 = j.value("include_d1", false);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("malformed feature_config: ") + e.what());
  }
}

std::vector<double> feature_vector(const QuadraticFit& fit, double d1, const FeatureConfig& cfg) {
  std::vector<double> out = {quantize_e9(fit.q0 / kTwoPi), quantize_e9(fit.q1 / kTwoPi), quantize_e9(fit.q2 / kTwoPi)};
  if (cfg.include_d1) out.push_back(quantize_e9(d1 / kTwoPi));
  return out;
}

std::vector<double> extract_features(const DintProfile& profile, const FeatureConfig& cfg) {
  const auto fit = fit_quadratic(profile, cfg.window);
  return feature_vector(fit, profile.d1(), cfg);
}

void Dataset::validate() const {
  std::set<std::tuple<double, double, double>> seen;
  for (const auto& r : records) {
    if (r.features.size() != features.size())
      fail(ErrorCode::schema, "record feature count does not match feature_config");
    for (double f : r.features)
      if (!std::isfinite(f)) fail(ErrorCode::schema, "non-finite feature value");
    if (!seen.emplace(r.geometry.radius_um, r.geometry.width_um, r.geometry.height_um).second)
      fail(ErrorCode::schema, "duplicate geometry in dataset");
  }
}

std::string Dataset::content_hash() const { return hex64(fnv1a64(dataset_csv(*this))); }

Dataset generate_dataset(const GridSpec& grid, const ForwardConfig& forward, const FeatureConfig& features,
                         std::uint64_t seed, int jobs, const ProgressFn& progress) {
  const auto geometries = enumerate_grid(grid);
  forward.resonance.validate();
  if (!(features.window.lo_um < features.window.hi_um)) fail(ErrorCode::config, "feature window needs lo < hi");

  std::vector<std::optional<SampleRecord>> slots(geometries.size());
  std::vector<std::string> reasons(geometries.size());
  std::mutex progress_mutex;
  std::size_t done = 0;

  parallel_for(geometries.size(), jobs, [&](std::size_t i) {
    const auto& g = geometries[i];
    try {
      const auto sim = simulate(resonator_for(g, forward), forward);
      slots[i] = SampleRecord{g, extract_features(sim.profile, features)};
    } catch (const Error& e) {
      reasons[i] = std::string(to_string(e.code())) + ": " + e.what();
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, geometries.size());
    }
  });

  Dataset ds;
  ds.features = features;
  ds.meta.seed = seed;
  ds.meta.tool_version = MRDESIGN_VERSION;
  ds.meta.grid = grid.to_json();
  ds.meta.solver = forward_config_json(forward);
  ds.meta.solver_hash = hex64(fnv1a64(ds.meta.solver.dump()));
  for (std::size_t i = 0; i < geometries.size(); ++i) {
    if (slots[i]) ds.records.push_back(std::move(*slots[i]));
    else ds.meta.rejects.push_back({geometries[i], reasons[i]});
  }

  if (ds.meta.rejects.size() * 10 > geometries.size()) {
    std::string summary = std::to_string(ds.meta.rejects.size()) + " of " + std::to_string(geometries.size()) +
                          " geometries failed the forward solve:";
    for (const auto& r : ds.meta.rejects) {
      summary += "\n  R=" + format_exact(r.geometry.radius_um) + " w=" + format_exact(r.geometry.width_um) +
                 " h=" + format_exact(r.geometry.height_um) + ": " + r.reason;
    }
    fail(ErrorCode::rejects, summary);
  }
  ds.validate();
  return ds;
}

std::string dataset_csv(const Dataset& ds) {
  std::string out = "radius_um,width_um,height_um";
  for (const auto& n : ds.features.names()) out += "," + n;
  out += '\n';
  for (const auto& r : ds.records) {
    out += format_e9(r.geometry.radius_um) + ',' + format_e9(r.geometry.width_um) + ',' +
           format_e9(r.geometry.height_um);
    for (double f : r.features) out += ',' + format_e9(f);
    out += '\n';
  }
  return out;
}

nlohmann::json dataset_meta_json(const Dataset& ds) {
  auto rejects = nlohmann::json::array();
  for (const auto& r : ds.meta.rejects)
    rejects.push_back({{"radius_um", r.geometry.radius_um},
                       {"width_um", r.geometry.width_um},
                       {"height_um", r.geometry.height_um},
                       {"reason", r.reason}});
  return {{"format", "mrdesign-dataset"},
          {"tool_version", ds.meta.tool_version},
          {"seed", ds.meta.seed},
          {"records", ds.records.size()},
          {"grid", ds.meta.grid},
          {"feature_config", ds.features.to_json()},
          {"solver", ds.meta.solver},
          {"solver_hash", ds.meta.solver_hash},
          {"rejects", rejects}};
}

std::string meta_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  return (p.parent_path() / (p.stem().string() + ".meta.json")).string();
}

void save_dataset(const Dataset& ds, const std::string& csv_path) {
  write_text_file(csv_path, dataset_csv(ds));
  write_text_file(meta_path_for(csv_path), dataset_meta_json(ds).dump(2) + "\n");
}

Dataset parse_dataset_csv(const std::string& text, const std::string& source) {
  const auto table = parse_csv(text, source);
  const std::vector<std::string> base = {"radius_um", "width_um", "height_um", "q0_hz", "q1_hz", "q2_hz"};
  auto with_d1 = base;
  with_d1.emplace_back("d1_hz");
  Dataset ds;
  if (table.header == base) ds.features.include_d1 = false;
  else if (table.header == with_d1) ds.features.include_d1 = true;
  else fail(ErrorCode::schema, source + ": unexpected dataset header");

  for (const auto& row : table.rows) {
    SampleRecord r;
    r.geometry = {parse_double(row[0], "radius_um"), parse_double(row[1], "width_um"),
                  parse_double(row[2], "height_um")};
    for (std::size_t c = 3; c < row.size(); ++c) r.features.push_back(parse_double(row[c], table.header[c]));
    ds.records.push_back(std::move(r));
  }
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::string& csv_path) {
  auto ds = parse_dataset_csv(read_text_file(csv_path), csv_path);
  const auto meta_path = meta_path_for(csv_path);
  if (std::filesystem::exists(meta_path)) {
    try {
      const auto meta = nlohmann::json::parse(read_text_file(meta_path));
      const auto features = FeatureConfig::from_json(meta.at("feature_config"));
      if (features.include_d1 != ds.features.include_d1)
        fail(ErrorCode::schema, meta_path + ": feature_config disagrees with the CSV header");
      ds.features = features;
      ds.meta.seed = meta.value("seed", std::uint64_t{0});
      ds.meta.tool_version = meta.value("tool_version", std::string());
      ds.meta.grid = meta.value("grid", nlohmann::json());
      ds.meta.solver = meta.value("solver", nlohmann::json());
      ds.meta.solver_hash = meta.value("solver_hash", std::string());
      for (const auto& r : meta.value("rejects", nlohmann::json::array()))
        ds.meta.rejects.push_back(
            {{r.at("radius_um").get<double>(), r.at("width_um").get<double>(), r.at("height_um").get<double>()},
             r.at("reason").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::schema, meta_path + ": " + e.what());
    }
  }
  return ds;
}

Split split_train_test(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) fail(ErrorCode::invalid_argument, "split ratio must lie in (0, 1)");
  if (n < 4) fail(ErrorCode::invalid_argument, "need at least 4 samples to split");
  // The epsilon keeps products like 0.29 * 100 from flooring to 28.
  auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  n_train = std::min(n_train, n - 1);
  if (n_train == 0) fail(ErrorCode::invalid_argument, "split ratio leaves the training set empty");

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  shuffle_indices(idx, rng);

  Split split;
  split.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.features = ds.features;
  out.meta = ds.meta;
  out.records.reserve(indices.size());
  for (auto i : indices) {
    if (i >= ds.records.size()) fail(ErrorCode::invalid_argument, "subset index out of range");
    out.records.push_back(ds.records[i]);
  }
  return out;
}

MinMaxNormalizer::MinMaxNormalizer(std::vector<double> min, std::vector<double> max)
    : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) fail(ErrorCode::schema, "normalizer min/max length mismatch");
  for (std::size_t c = 0; c < min_.size(); ++c)
    if (!(max_[c] >= min_[c])) fail(ErrorCode::schema, "normalizer needs max >= min in every column");
}

MinMaxNormalizer MinMaxNormalizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "cannot fit a normalizer on zero rows");
  std::vector<double> lo = rows.front(), hi = rows.front();
  for (const auto& r : rows) {
    if (r.size() != lo.size()) fail(ErrorCode::invalid_argument, "ragged rows");
    for (std::size_t c = 0; c < r.size(); ++c) {
      lo[c] = std::min(lo[c], r[c]);
      hi[c] = std::max(hi[c], r[c]);
    }
  }
  return {std::move(lo), std::move(hi)};
}

double MinMaxNormalizer::apply(std::size_t c, double v) const {
  const double range = max_[c] - min_[c];
  return range > 0.0 ? (v - min_[c]) / range : 0.0;
}

double MinMaxNormalizer::invert(std::size_t c, double v) const {
  const double range = max_[c] - min_[c];
  return range > 0.0 ? min_[c] + v * range : min_[c];
}

std::vector<double> MinMaxNormalizer::apply(const std::vector<double>& x) const {
  if (x.size() != size()) fail(ErrorCode::invalid_argument, "normalizer dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = apply(c, x[c]);
  return out;
}

std::vector<double> MinMaxNormalizer::invert(const std::vector<double>& x) const {
  if (x.size() != size()) fail(ErrorCode::invalid_argument, "normalizer dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = invert(c, x[c]);
  return out;
}

nlohmann::json MinMaxNormalizer::to_json() const { return {{"min", min_}, {"max", max_}}; }

MinMaxNormalizer MinMaxNormalizer::from_json(const nlohmann::json& j) {
  try {
    return {j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("malformed normalizer: ") + e.what());
  }
}

}  // namespace mrdesign
