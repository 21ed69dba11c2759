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
#include "inverse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "common.hpp"

namespace mrdesign {

namespace {

constexpr std::size_t kMinMeasuredRows = 5;

std::vector<double> numeric_column(const CsvTable& table, const char* name) {
  const int c = table.column(name);
  std::vector<double> out;
  for (const auto& row : table.rows) out.push_back(parse_double(row[static_cast<std::size_t>(c)], name));
  return out;
}

// +1 ascending, -1 descending; throws otherwise.
int monotone_direction(const std::vector<double>& v, const std::string& what) {
  const int dir = v[1] > v[0] ? 1 : -1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const bool ok = dir > 0 ? v[i] > v[i - 1] : v[i] < v[i - 1];
    if (!ok) fail(ErrorCode::schema, what + " is not strictly monotone at row " + std::to_string(i + 1));
  }
  return dir;
}

MeasuredProfile ingest_wavelength(const CsvTable& table, double pump_um) {
  auto lambda_nm = numeric_column(table, "wavelength_nm");
  auto dint_hz = numeric_column(table, "dint_hz");
  for (double l : lambda_nm)
    if (!(l > 0.0)) fail(ErrorCode::schema, "wavelength_nm must be positive");
  // Sort by ascending frequency, i.e. descending wavelength.
  if (monotone_direction(lambda_nm, "wavelength_nm") > 0) {
    std::reverse(lambda_nm.begin(), lambda_nm.end());
    std::reverse(dint_hz.begin(), dint_hz.end());
  }
  const std::size_t n = lambda_nm.size();
  std::size_t pump = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(lambda_nm[i] / 1000.0 - pump_um);
    if (d < best || (d == best && lambda_nm[i] < lambda_nm[pump])) {
      best = d;
      pump = i;
    }
  }
  if (pump == 0 || pump + 1 == n) fail(ErrorCode::domain, "the pump row needs a neighbour on each side");

  std::vector<double> omega(n);
  for (std::size_t i = 0; i < n; ++i) omega[i] = kTwoPi * kSpeedOfLight / (lambda_nm[i] * 1e-9);
  const double d1 = 0.5 * (omega[pump + 1] - omega[pump - 1]);
  std::vector<DintPoint> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int mu = static_cast<int>(i) - static_cast<int>(pump);
    points[i] = {mu, kTwoPi * (dint_hz[i] - dint_hz[pump]), omega[i]};
  }
  return {MeasuredSchema::wavelength_dint, DintProfile(std::move(points), d1, omega[pump])};
}

MeasuredProfile ingest_resonances(const CsvTable& table, double pump_um) {
  const auto modes = numeric_column(table, "mode_index");
  const auto freq = numeric_column(table, "resonance_hz");
  const int mdir = monotone_direction(modes, "mode_index");
  const int fdir = monotone_direction(freq, "resonance_hz");
  if (mdir != fdir) fail(ErrorCode::schema, "mode_index and resonance_hz run in opposite directions");
  ResonanceSet set;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i] != std::round(modes[i])) fail(ErrorCode::schema, "mode_index must be an integer");
    if (!(freq[i] > 0.0)) fail(ErrorCode::schema, "resonance_hz must be positive");
    set.entries.push_back({static_cast<int>(modes[i]), kTwoPi * freq[i], 0.0});
  }
  if (mdir < 0) std::reverse(set.entries.begin(), set.entries.end());
  set.pump_target_um = pump_um;
  set.pump_m = nearest_pump_mode(set.entries, pump_um);
  set.validate();
  return {MeasuredSchema::mode_resonance, integrated_dispersion(set)};
}

}  // namespace

MeasuredProfile ingest_measured(const CsvTable& table, double pump_um) {
  if (!(pump_um > 0.0)) fail(ErrorCode::invalid_argument, "pump wavelength must be positive");
  if (table.rows.size() < kMinMeasuredRows)
    fail(ErrorCode::schema, "measured profile needs at least " + std::to_string(kMinMeasuredRows) + " rows, got " +
                                std::to_string(table.rows.size()));
  const std::vector<std::string> a = {"wavelength_nm", "dint_hz"};
  const std::vector<std::string> b = {"mode_index", "resonance_hz"};
  if (table.header == a) return ingest_wavelength(table, pump_um);
  if (table.header == b) return ingest_resonances(table, pump_um);
  fail(ErrorCode::schema, "measured profile header must be 'wavelength_nm,dint_hz' or 'mode_index,resonance_hz'");
}

MeasuredProfile ingest_measured_file(const std::string& path, double pump_um) {
  return ingest_measured(read_csv(path), pump_um);
}

MeasuredProfile ingest_measured_text(const std::string& text, double pump_um) {
  return ingest_measured(parse_csv(text, "<measured>"), pump_um);
}

std::string export_measured(const DintProfile& profile) {
  std::string out = "wavelength_nm,dint_hz\n";
  const auto& pts = profile.points();
  for (auto it = pts.rbegin(); it != pts.rend(); ++it)
    out += format_exact(it->wavelength_um() * 1000.0) + ',' + format_exact(it->dint / kTwoPi) + '\n';
  return out;
}

bool profiles_match(const DintProfile& a, const DintProfile& b, double rel_tol) {
  if (a.size() != b.size()) return false;
  const auto close = [&](double x, double y, double scale) {
    return std::abs(x - y) <= rel_tol * std::max({std::abs(x), std::abs(y), scale});
  };
  double scale = 0.0;
  for (const auto& p : a.points()) scale = std::max(scale, std::abs(p.dint));
  if (!close(a.d1(), b.d1(), 0.0) || !close(a.omega0(), b.omega0(), 0.0)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& p = a.points()[i];
    const auto& q = b.points()[i];
    if (p.mu != q.mu || !close(p.omega, q.omega, 0.0) || !close(p.dint, q.dint, scale)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- prediction

nlohmann::json GeometryEstimate::to_json() const {
  nlohmann::json j = {
      {"predicted", {{"radius_um", predicted.radius_um}, {"width_um", predicted.width_um}, {"height_um", predicted.height_um}}},
      {"model_kind", model_kind},
      {"feature_names", feature_names},
      {"features", features},
      {"fit", {{"q0_hz", fit.q0 / kTwoPi}, {"q1_hz", fit.q1 / kTwoPi}, {"q2_hz", fit.q2 / kTwoPi},
               {"mu_lo", fit.mu_lo}, {"mu_hi", fit.mu_hi}, {"points", fit.points},
               {"residual_rms_hz", fit.residual_rms / kTwoPi}}},
      {"low_confidence", low_confidence},
      {"warnings", warnings}};
  if (actual) {
    j["actual"] = {{"radius_um", actual->radius_um}, {"width_um", actual->width_um}, {"height_um", actual->height_um}};
    j["percent_error"] = {{"radius_um", percent_error[0]}, {"width_um", percent_error[1]}, {"height_um", percent_error[2]}};
  }
  return j;
}

GeometryEstimate predict_geometry(const Model& model, const DintProfile& profile, const std::optional<Geometry>& actual) {
  GeometryEstimate est;
  est.model_kind = to_string(model.kind);
  est.feature_names = model.features.names();

  const auto& win = model.features.window;
  const double lo = profile_min_wavelength_um(profile);
  const double hi = profile_max_wavelength_um(profile);
  if (lo > win.lo_um || hi < win.hi_um) {
    est.warnings.push_back("profile spans " + format_e9(lo) + " to " + format_e9(hi) +
                           " um, which does not cover the model's feature window " + format_e9(win.lo_um) + " to " +
                           format_e9(win.hi_um) + " um");
  }
  est.fit = fit_quadratic(profile, win);
  est.features = feature_vector(est.fit, profile.d1(), model.features);

  for (std::size_t c = 0; c < est.features.size(); ++c) {
    if (est.features[c] < model.feature_min[c] || est.features[c] > model.feature_max[c]) {
      est.low_confidence = true;
      est.warnings.push_back("feature " + est.feature_names[c] + " = " + format_e9(est.features[c]) +
                             " lies outside the training range [" + format_e9(model.feature_min[c]) + ", " +
                             format_e9(model.feature_max[c]) + "]");
    }
  }
  if (std::abs(est.features[2]) < 0.01 * model.max_abs_q2) {
    est.low_confidence = true;
    est.warnings.push_back("curvature q2 is below 1% of the largest training value (near zero dispersion)");
  }

  const auto y = model.predict(est.features);
  est.predicted = {y[0], y[1], y[2]};
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::internal, "model produced a non-positive geometry");
  if (actual) {
    est.actual = actual;
    const auto a = actual->values();
    for (std::size_t i = 0; i < 3; ++i) est.percent_error[i] = std::abs(y[i] - a[i]) / std::abs(a[i]) * 100.0;
  }
  return est;
}

// ---------------------------------------------------------------- sensitivity

void SensitivityConfig::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail(ErrorCode::config, "sensitivity delta must be >= 0");
  if (!(window.lo_um < window.hi_um)) fail(ErrorCode::config, "sensitivity window needs lo < hi");
  if (!(floor_hz >= 0.0)) fail(ErrorCode::config, "sensitivity floor_hz must be >= 0");
}

nlohmann::json SensitivityConfig::to_json() const {
  return {{"delta", delta}, {"window_um", {window.lo_um, window.hi_um}}, {"floor_hz", floor_hz}};
}

SensitivityEntry compare_profiles(const DintProfile& reference, const DintProfile& other, const SensitivityConfig& cfg) {
  std::map<int, double> theirs;
  for (const auto& p : other.points()) theirs[p.mu] = p.dint;
  const double floor = cfg.floor_hz * kTwoPi;
  SensitivityEntry e;
  double sum = 0.0;
  for (const auto& p : reference.points()) {
    const double lambda = p.wavelength_um();
    if (lambda < cfg.window.lo_um || lambda > cfg.window.hi_um) continue;
    const auto it = theirs.find(p.mu);
    if (it == theirs.end()) continue;
    if (std::abs(p.dint) < floor) {
      ++e.excluded;
      continue;
    }
    sum += std::abs((it->second - p.dint) / p.dint);
    ++e.points;
  }
  if (e.points == 0) fail(ErrorCode::domain, "no shared modes above the D_int floor inside the window");
  e.mape_percent = sum / static_cast<double>(e.points) * 100.0;
  return e;
}

nlohmann::json SensitivityReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    rows.push_back({{"parameter", e.parameter},
                    {"perturbed_value_um", e.perturbed_value_um},
                    {"dint_mape_percent", e.mape_percent},
                    {"points", e.points},
                    {"excluded_below_floor", e.excluded},
                    {"reference_percent", kReferenceSensitivityPercent[i]}});
  }
  return {{"baseline", {{"radius_um", baseline.radius_um}, {"width_um", baseline.width_um}, {"height_um", baseline.height_um}}},
          {"config", config.to_json()},
          {"parameters", rows},
          {"reference_note", "reference values are published figures from a different solver; not a pass criterion"}};
}

SensitivityReport sensitivity_analysis(const Geometry& baseline, const ForwardConfig& forward,
                                       const SensitivityConfig& cfg, int jobs) {
  cfg.validate();
  const double s = 1.0 + cfg.delta;
  const std::array<std::string, 3> names = {"radius", "height", "width"};
  std::array<Geometry, 4> geoms = {baseline, baseline, baseline, baseline};
  geoms[1].radius_um *= s;
  geoms[2].height_um *= s;
  geoms[3].width_um *= s;

  std::vector<std::optional<DintProfile>> profiles(geoms.size());
  parallel_for(geoms.size(), jobs, [&](std::size_t i) {
    profiles[i] = simulate(resonator_for(geoms[i], forward), forward).profile;
  });

  SensitivityReport report;
  report.baseline = baseline;
  report.config = cfg;
  const std::array<double, 3> values = {geoms[1].radius_um, geoms[2].height_um, geoms[3].width_um};
  for (std::size_t i = 0; i < 3; ++i) {
    auto e = compare_profiles(*profiles[0], *profiles[i + 1], cfg);
    e.parameter = names[i];
    e.perturbed_value_um = values[i];
    report.entries.push_back(e);
  }
  return report;
}

// ---------------------------------------------------------------- round trip

nlohmann::json RoundTripReport::to_json() const {
  return {{"actual", {{"radius_um", actual.radius_um}, {"width_um", actual.width_um}, {"height_um", actual.height_um}}},
          {"estimate", estimate.to_json()},
          {"dint_rms_hz", dint_rms_hz},
          {"dint_max_abs_hz", dint_max_abs_hz},
          {"shared_points", shared_points}};
}

RoundTripReport round_trip(const Model& model, const Geometry& actual, const ForwardConfig& forward) {
  RoundTripReport report;
  report.actual = actual;
  const auto first = simulate(resonator_for(actual, forward), forward).profile;
  report.estimate = predict_geometry(model, first, actual);
  const auto second = report.estimate.predicted == actual
                          ? first
                          : simulate(resonator_for(report.estimate.predicted, forward), forward).profile;

  std::map<int, double> theirs;
  for (const auto& p : second.points()) theirs[p.mu] = p.dint;
  const auto& win = model.features.window;
  double sq = 0.0;
  for (const auto& p : first.points()) {
    const double lambda = p.wavelength_um();
    if (lambda < win.lo_um || lambda > win.hi_um) continue;
    const auto it = theirs.find(p.mu);
    if (it == theirs.end()) continue;
    const double d = (it->second - p.dint) / kTwoPi;
    sq += d * d;
    report.dint_max_abs_hz = std::max(report.dint_max_abs_hz, std::abs(d));
    ++report.shared_points;
  }
  if (report.shared_points == 0) fail(ErrorCode::domain, "round trip profiles share no modes inside the window");
  report.dint_rms_hz = std::sqrt(sq / static_cast<double>(report.shared_points));
  return report;
}

}  // namespace mrdesign
