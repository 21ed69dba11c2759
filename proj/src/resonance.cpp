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
#include "resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <Eigen/Dense>

#include "common.hpp"

namespace mrdesign {

void ResonatorSpec::validate() const {
  if (!std::isfinite(radius_um) || !(radius_um > 0.0)) fail(ErrorCode::invalid_argument, "radius must be > 0");
  if (!std::isfinite(width_um) || !(width_um > 0.0)) fail(ErrorCode::invalid_argument, "width must be > 0");
  if (!std::isfinite(height_um) || !(height_um > 0.0)) fail(ErrorCode::invalid_argument, "height must be > 0");
}

CrossSection ResonatorSpec::cross_section(const ModeSolverConfig& cfg) const {
  CrossSection xs;
  xs.core_width_um = width_um;
  xs.core_height_um = height_um;
  xs.clad_width_um = cfg.clad_width_um;
  xs.clad_height_um = cfg.clad_height_um;
  if (cfg.bend) xs.bend_radius_um = radius_um;
  return xs;
}

void ResonanceSolverConfig::validate() const {
  if (!(threshold_hz > 0.0)) fail(ErrorCode::config, "resonance threshold must be > 0");
  if (max_iterations < 1) fail(ErrorCode::config, "resonance max_iterations must be >= 1");
  if (!(band.lo_um > 0.0) || !(band.lo_um < band.hi_um)) fail(ErrorCode::config, "resonance band needs 0 < lo < hi");
  if (samples < 4) fail(ErrorCode::config, "interpolated strategy needs at least 4 samples");
  if (!(pump_wavelength_um > 0.0)) fail(ErrorCode::config, "pump wavelength must be > 0");
  if (spot_checks < 0 || spot_offset < 1) fail(ErrorCode::config, "bad spot-check settings");
}

void ResonanceSet::validate() const {
  if (entries.empty()) fail(ErrorCode::internal, "resonance set is empty");
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].m <= entries[i - 1].m) fail(ErrorCode::internal, "mode numbers not strictly increasing");
    if (entries[i].omega <= entries[i - 1].omega)
      fail(ErrorCode::internal, "resonance frequencies not strictly increasing at m = " +
                                    std::to_string(entries[i].m));
  }
  if (!find(pump_m)) fail(ErrorCode::internal, "pump mode missing from resonance set");
}

const ResonanceEntry* ResonanceSet::find(int m) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), m,
                             [](const ResonanceEntry& e, int v) { return e.m < v; });
  return (it != entries.end() && it->m == m) ? &*it : nullptr;
}

int nearest_pump_mode(const std::vector<ResonanceEntry>& entries, double pump_um) {
  if (entries.empty()) fail(ErrorCode::internal, "no modes to choose a pump from");
  int best = entries.front().m;
  double best_dist = INFINITY, best_lambda = INFINITY;
  for (const auto& e : entries) {
    const double lambda = wavelength_from_omega(e.omega);
    const double dist = std::abs(lambda - pump_um);
    if (dist < best_dist || (dist == best_dist && lambda < best_lambda)) {
      best = e.m;
      best_dist = dist;
      best_lambda = lambda;
    }
  }
  return best;
}

double guess_frequency(int m, double radius_um, double n) {
  if (m < 1 || !(radius_um > 0.0) || !(n > 0.0))
    fail(ErrorCode::invalid_argument, "guess_frequency needs m >= 1, R > 0, n > 0");
  return m * kSpeedOfLight / (kTwoPi * radius_um * 1e-6 * n);
}

ResonanceSolution solve_resonance(int m, double radius_um, double seed_index, const IndexFunction& n_eff,
                                  const ResonanceSolverConfig& cfg) {
  cfg.validate();
  double f = guess_frequency(m, radius_um, seed_index);
  double change = INFINITY;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const double n = n_eff(wavelength_from_frequency(f));
    const double next = guess_frequency(m, radius_um, n);
    change = std::abs(next - f);
    if (change < cfg.threshold_hz) return {next, n, k};
    f = next;
  }
  char msg[160];
  std::snprintf(msg, sizeof msg, "resonance m = %d did not converge in %d iterations (last |df| = %.3e Hz)", m,
                cfg.max_iterations, change);
  fail(ErrorCode::not_converged, msg);
}

RingIndexModel::RingIndexModel(const ResonatorSpec& spec, const MaterialLibrary& lib, const ModeSolverConfig& cfg)
    : spec_(spec), lib_(&lib), cfg_(cfg) {
  spec_.validate();
  cfg_.core_material = spec_.core_material;
  cfg_.clad_material = spec_.clad_material;
  lib.get(cfg_.core_material);
  lib.get(cfg_.clad_material);
}

double RingIndexModel::operator()(double lambda_um) {
  ++solves_;
  const auto map = build_index_map(spec_.cross_section(cfg_), lambda_um, *lib_, cfg_);
  auto sol = solver_.solve(map, lambda_um, cfg_.eigen, last_field_.empty() ? nullptr : &last_field_);
  if (!sol.guided)
    fail(ErrorCode::unguided, "fundamental mode is not guided at " + format_exact(lambda_um) + " um (n_eff " +
                                  format_exact(sol.n_eff) + " <= n_clad " + format_exact(map.n_clad) + ")");
  last_field_ = std::move(sol.field);
  return sol.n_eff;
}

double RingIndexModel::core_index(double lambda_um) const {
  return lib_->get(cfg_.core_material).refractive_index(lambda_um);
}

ResonanceSolution solve_resonance(const ResonatorSpec& spec, int m, const ResonanceSolverConfig& cfg,
                                  const MaterialLibrary& lib, const ModeSolverConfig& mode_cfg) {
  RingIndexModel model(spec, lib, mode_cfg);
  const double seed = model.core_index(0.5 * (cfg.band.lo_um + cfg.band.hi_um));
  return solve_resonance(m, spec.radius_um, seed, std::ref(model), cfg);
}

std::vector<double> ChebyshevInterpolant::nodes(double lo, double hi, int count) {
  std::vector<double> x(count);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int k = 0; k < count; ++k) x[k] = mid + half * std::cos(kPi * k / (count - 1));
  x.front() = hi;
  x.back() = lo;
  return x;
}

ChebyshevInterpolant::ChebyshevInterpolant(double lo, double hi, std::vector<double> values)
    : x_(nodes(lo, hi, static_cast<int>(values.size()))), y_(std::move(values)), w_(y_.size()) {
  if (y_.size() < 2) fail(ErrorCode::internal, "interpolant needs at least 2 nodes");
  for (std::size_t k = 0; k < w_.size(); ++k) w_[k] = (k % 2 == 0) ? 1.0 : -1.0;
  w_.front() *= 0.5;
  w_.back() *= 0.5;
}

double ChebyshevInterpolant::operator()(double x) const {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x_.size(); ++k) {
    const double d = x - x_[k];
    if (d == 0.0) return y_[k];
    const double t = w_[k] / d;
    num += t * y_[k];
    den += t;
  }
  return num / den;
}

namespace {

// Modes compared between strategies: the pump and two offset modes, clamped
// to the available range and topped up with the pump's nearest neighbours.
std::vector<int> spot_check_modes(const ResonanceSet& set, int count, int offset) {
  std::vector<int> out;
  if (count <= 0) return out;
  const int first = set.entries.front().m, last = set.entries.back().m;
  const int want = std::min<int>(count, static_cast<int>(set.entries.size()));
  auto add = [&](int m) {
    m = std::clamp(m, first, last);
    if (static_cast<int>(out.size()) < want && set.find(m) &&
        std::find(out.begin(), out.end(), m) == out.end())
      out.push_back(m);
  };
  add(set.pump_m);
  add(set.pump_m - offset);
  add(set.pump_m + offset);
  for (int d = 1; static_cast<int>(out.size()) < want && d <= last - first; ++d) {
    add(set.pump_m - d);
    add(set.pump_m + d);
  }
  return out;
}

}  // namespace

ResonanceSet resonance_band(double radius_um, double seed_index, const IndexFunction& n_eff,
                            const ResonanceSolverConfig& cfg) {
  cfg.validate();
  if (!(radius_um > 0.0)) fail(ErrorCode::invalid_argument, "radius must be > 0");
  const double f_lo = frequency_from_wavelength(cfg.band.hi_um);
  const double f_hi = frequency_from_wavelength(cfg.band.lo_um);
  const double per_mode = kSpeedOfLight / (kTwoPi * radius_um * 1e-6);  // f n per unit m

  ResonanceSet set;
  set.pump_target_um = cfg.pump_wavelength_um;

  std::optional<ChebyshevInterpolant> interp;
  double phase_lo, phase_hi;  // f n_eff at the band edges
  if (cfg.strategy == ResonanceStrategy::interpolated) {
    auto nodes = ChebyshevInterpolant::nodes(f_lo, f_hi, cfg.samples);
    std::vector<double> values(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) values[k] = n_eff(wavelength_from_frequency(nodes[k]));
    interp.emplace(f_lo, f_hi, std::move(values));
    phase_lo = f_lo * (*interp)(f_lo);
    phase_hi = f_hi * (*interp)(f_hi);
  } else {
    phase_lo = f_lo * n_eff(cfg.band.hi_um);
    phase_hi = f_hi * n_eff(cfg.band.lo_um);
  }
  if (!(phase_hi > phase_lo)) fail(ErrorCode::internal, "f * n_eff is not increasing across the band");

  const int m_first = static_cast<int>(std::ceil(phase_lo / per_mode));
  const int m_last = static_cast<int>(std::floor(phase_hi / per_mode));

  for (int m = std::max(m_first, 1); m <= m_last; ++m) {
    const double target = m * per_mode;
    if (interp) {
      double lo = f_lo, hi = f_hi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (mid * (*interp)(mid) < target) lo = mid; else hi = mid;
      }
      const double f = 0.5 * (lo + hi);
      set.entries.push_back({m, kTwoPi * f, (*interp)(f)});
    } else {
      const auto sol = solve_resonance(m, radius_um, seed_index, n_eff, cfg);
      if (sol.frequency_hz >= f_lo && sol.frequency_hz <= f_hi)
        set.entries.push_back({m, kTwoPi * sol.frequency_hz, sol.n_eff});
    }
  }
  if (set.entries.empty())
    fail(ErrorCode::domain, "no resonance inside the band [" + format_exact(cfg.band.lo_um) + ", " +
                                format_exact(cfg.band.hi_um) + "] um");

  set.pump_m = nearest_pump_mode(set.entries, cfg.pump_wavelength_um);

  if (interp) {
    const double tolerance = 10.0 * cfg.threshold_hz;
    for (int m : spot_check_modes(set, cfg.spot_checks, cfg.spot_offset)) {
      const auto direct = solve_resonance(m, radius_um, seed_index, n_eff, cfg);
      const double f_interp = set.find(m)->omega / kTwoPi;
      set.spot_checks.push_back({m, f_interp, direct.frequency_hz, direct.iterations});
      if (!(std::abs(f_interp - direct.frequency_hz) <= tolerance)) {
        char msg[200];
        std::snprintf(msg, sizeof msg,
                      "interpolated and direct resonances disagree at m = %d: %.6e Hz vs %.6e Hz (tolerance %.1e Hz)",
                      m, f_interp, direct.frequency_hz, tolerance);
        fail(ErrorCode::consistency, msg);
      }
    }
  }
  set.validate();
  return set;
}

ResonanceSet resonance_band(const ResonatorSpec& spec, const ResonanceSolverConfig& cfg,
                            const MaterialLibrary& lib, const ModeSolverConfig& mode_cfg) {
  RingIndexModel model(spec, lib, mode_cfg);
  const double seed = model.core_index(0.5 * (cfg.band.lo_um + cfg.band.hi_um));
  return resonance_band(spec.radius_um, seed, std::ref(model), cfg);
}

DintProfile::DintProfile(std::vector<DintPoint> points, double d1, double omega0)
    : points_(std::move(points)), d1_(d1), omega0_(omega0) {
  bool has_pump = false;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0 && points_[i].mu <= points_[i - 1].mu) fail(ErrorCode::internal, "profile mu not strictly increasing");
    if (!std::isfinite(points_[i].dint)) fail(ErrorCode::domain, "non-finite D_int value");
    if (points_[i].mu == 0) {
      if (points_[i].dint != 0.0) fail(ErrorCode::internal, "D_int at the pump must be exactly zero");
      has_pump = true;
    }
  }
  if (!has_pump) fail(ErrorCode::internal, "profile has no pump point (mu = 0)");
}

DintProfile integrated_dispersion(const ResonanceSet& set) {
  const auto* pump = set.find(set.pump_m);
  const auto* below = set.find(set.pump_m - 1);
  const auto* above = set.find(set.pump_m + 1);
  if (!pump || !below || !above)
    fail(ErrorCode::domain, "integrated dispersion needs the pump mode and both neighbours");
  const double omega0 = pump->omega;
  const double d1 = 0.5 * (above->omega - below->omega);
  std::vector<DintPoint> points;
  points.reserve(set.entries.size());
  for (const auto& e : set.entries) {
    const int mu = e.m - set.pump_m;
    points.push_back({mu, e.omega - omega0 - d1 * mu, e.omega});
  }
  return DintProfile(std::move(points), d1, omega0);
}

QuadraticFit fit_quadratic(const DintProfile& profile, const FitWindow& window) {
  std::vector<const DintPoint*> sel;
  for (const auto& p : profile.points()) {
    bool inside;
    if (const auto* w = std::get_if<WavelengthWindow>(&window)) {
      const double lambda = p.wavelength_um();
      inside = lambda >= w->lo_um && lambda <= w->hi_um;
    } else {
      const auto& mw = std::get<ModeWindow>(window);
      inside = p.mu >= mw.mu_lo && p.mu <= mw.mu_hi;
    }
    if (inside) sel.push_back(&p);
  }
  if (static_cast<int>(sel.size()) < kMinFitPoints)
    fail(ErrorCode::domain, "quadratic fit needs at least " + std::to_string(kMinFitPoints) + " modes in the window, got " +
                                std::to_string(sel.size()));

  const int n = static_cast<int>(sel.size());
  double scale = 0.0;
  for (const auto* p : sel) scale = std::max(scale, std::abs(static_cast<double>(p->mu)));
  if (scale == 0.0) fail(ErrorCode::domain, "degenerate quadratic fit (all mu identical)");

  // Scaled Vandermonde keeps the normal equations out of it.
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double t = sel[i]->mu / scale;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    b[i] = sel[i]->dint;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) fail(ErrorCode::domain, "degenerate quadratic fit (rank deficient)");
  const Eigen::Vector3d c = qr.solve(b);

  QuadraticFit fit;
  fit.q0 = c[0];
  fit.q1 = c[1] / scale;
  fit.q2 = c[2] / (scale * scale);
  fit.mu_lo = sel.front()->mu;
  fit.mu_hi = sel.back()->mu;
  fit.points = n;
  const Eigen::VectorXd r = a * c - b;
  fit.residual_rms = std::sqrt(r.squaredNorm() / n);
  return fit;
}

double profile_min_wavelength_um(const DintProfile& profile) {
  return profile.points().back().wavelength_um();
}

double profile_max_wavelength_um(const DintProfile& profile) {
  return profile.points().front().wavelength_um();
}

std::string dint_csv(const DintProfile& profile) {
  std::string out = "mu,dint_hz\n";
  for (const auto& p : profile.points()) {
    out += std::to_string(p.mu);
    out += ',';
    out += format_e9(p.dint / kTwoPi);
    out += '\n';
  }
  return out;
}

std::string fsr_csv(const ResonanceSet& set) {
  std::string out = "mu,m,frequency_hz,wavelength_nm,fsr_hz\n";
  for (const auto& e : set.entries) {
    const auto* lo = set.find(e.m - 1);
    const auto* hi = set.find(e.m + 1);
    if (!lo || !hi) continue;
    const double f = e.omega / kTwoPi;
    out += std::to_string(e.m - set.pump_m) + ',' + std::to_string(e.m) + ',' + format_e9(f) + ',' +
           format_e9(wavelength_from_frequency(f) * 1e3) + ',' + format_e9(0.5 * (hi->omega - lo->omega) / kTwoPi) +
           '\n';
  }
  return out;
}

Simulation simulate(const ResonatorSpec& spec, const ForwardConfig& cfg) {
  auto set = resonance_band(spec, cfg.resonance, cfg.materials, cfg.mode);
  auto profile = integrated_dispersion(set);
  return {std::move(set), std::move(profile)};
}

}  // namespace mrdesign
