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
#include "selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "common.hpp"
#include "dataset.hpp"
#include "inverse.hpp"
#include "ml.hpp"
#include "model.hpp"
#include "oracles.hpp"

namespace mrdesign {

ResonanceSet synthetic_comb(int m0, int below, int above, double omega0, double d1, double d2, double d3) {
  ResonanceSet set;
  for (int mu = -below; mu <= above; ++mu) {
    const double u = mu;
    set.entries.push_back({m0 + mu, omega0 + d1 * u + d2 * u * u / 2.0 + d3 * u * u * u / 6.0, 0.0});
  }
  set.pump_m = m0;
  set.validate();
  return set;
}

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string num(double v) { return format_e9(v); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Exactly representable comb: every ω is an integer below 2^53.
constexpr double kOmega0 = 1.2e15, kD1 = 3.1e12, kD2 = 2e7;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

// Small dataset whose features come from synthetic combs with a distinct
// curvature per geometry.
Dataset synthetic_dataset() {
  GridSpec g{{40.0, 80.0, 120.0}, {1.2, 1.6, 2.0}, {0.6, 0.7}};
  Dataset ds;
  int k = 0;
  for (const auto& geom : enumerate_grid(g)) {
    const auto comb = synthetic_comb(200, 40, 40, kOmega0, kD1 * 50.0 / geom.radius_um, kTwoPi * 1e3 * (++k));
    ds.records.push_back({geom, extract_features(integrated_dispersion(comb), ds.features)});
  }
  ds.validate();
  return ds;
}

using CheckFn = std::string (*)(int jobs);

std::string check_grid(int) {
  const auto grid = GridSpec::reference_grid();
  const auto all = enumerate_grid(grid);
  expect(all.size() == 462, "reference grid has " + std::to_string(all.size()) + " geometries");
  const std::vector<double> r = {30, 50, 70, 90, 110, 130};
  const std::vector<double> w = {1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
  const std::vector<double> h = {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8};
  expect(grid.radii_um == r && grid.widths_um == w && grid.heights_um == h, "axis values differ from literals");
  expect(all.front() == Geometry{30, 1.0, 0.5} && all[1] == Geometry{30, 1.0, 0.55}, "enumeration order");
  return "462 geometries, exact axis values";
}

std::string check_sellmeier(int) {
  const MaterialLibrary lib;
  const double l = 1.55, l2 = l * l;
  const double si3n4 = std::sqrt(1.0 + 3.0249 * l2 / (l2 - 0.1353406 * 0.1353406) +
                                 40314.0 * l2 / (l2 - 1239.842 * 1239.842));
  const double sio2 = std::sqrt(1.0 + 0.6961663 * l2 / (l2 - 0.0684043 * 0.0684043) +
                                0.4079426 * l2 / (l2 - 0.1162414 * 0.1162414) +
                                0.8974794 * l2 / (l2 - 9.896161 * 9.896161));
  const double a = lib.get("Si3N4").refractive_index(l), b = lib.get("SiO2").refractive_index(l);
  expect(rel(a, si3n4) < 1e-14 && rel(b, sio2) < 1e-14, "Sellmeier values differ from the literal formula");
  bool threw = false;
  try {
    lib.get("SiO2").refractive_index(3.0);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::domain;
  }
  expect(threw, "out-of-range wavelength did not raise a domain error");
  return "n(1.55) Si3N4 " + num(a) + ", SiO2 " + num(b);
}

std::string check_box(int) {
  IndexMap m;
  m.grid = SimGrid::spanning(3.0, 2.88, 30, 24);
  m.n.assign(m.grid.cells(), 1.45);
  m.n_core = m.n_clad = 1.45;
  m.wavelength_um = 1.55;
  const auto sol = solve_fundamental_mode(m, 1.55);
  const double k0 = kTwoPi / 1.55;
  const double ref = oracle::box_eigenvalue(30, 24, m.grid.dx, m.grid.dy, k0, 1.45);
  const double e = rel(sol.beta_squared, ref);
  expect(e <= 1e-10, "box eigenvalue relative error " + num(e));
  return "relative error " + num(e);
}

std::string check_slab(int) {
  const MaterialLibrary lib;
  const double lambda = 1.55;
  const double n1 = lib.get("Si3N4").refractive_index(lambda), n2 = lib.get("SiO2").refractive_index(lambda);
  IndexMap m;
  m.grid = SimGrid::spanning(4.0, 4.0, 200, 200);
  m.n_core = n1;
  m.n_clad = n2;
  m.wavelength_um = lambda;
  m.n.resize(m.grid.cells());
  for (int j = 0; j < 200; ++j)
    for (int i = 0; i < 200; ++i) m.n[static_cast<std::size_t>(j) * 200 + i] = std::abs(m.grid.x_offset(i)) <= 0.5 ? n1 : n2;
  const auto sol = solve_fundamental_mode(m, lambda);
  const double k0 = kTwoPi / lambda;
  const double b = oracle::slab_beta(1.0, lambda, n1, n2);
  // Uniform in y: the y walls contribute the lowest sine mode of the box.
  const double ref = std::sqrt(b * b - std::pow(oracle::kPi / 4.0, 2)) / k0;
  const double e = std::abs(sol.n_eff - ref);
  expect(e < 2e-3, "slab n_eff error " + num(e));
  return "n_eff " + num(sol.n_eff) + " vs " + num(ref) + ", error " + num(e);
}

std::string check_dispersionless(int) {
  ResonanceSolverConfig cfg;
  const double n = 1.9, R = 80.0;
  const int m = 600;
  const auto s = solve_resonance(m, R, n, [&](double) { return n; }, cfg);
  const double expect_f = m * kSpeedOfLight / (kTwoPi * R * 1e-6 * n);
  expect(std::abs(s.frequency_hz - expect_f) < cfg.threshold_hz, "dispersionless resonance is off");
  expect(s.iterations <= 2, "dispersionless case took " + std::to_string(s.iterations) + " iterations");
  return "f = " + num(s.frequency_hz) + " Hz in " + std::to_string(s.iterations) + " iteration(s)";
}

std::string check_fixed_point(int) {
  ResonanceSolverConfig cfg;
  const double R = 50.0;
  const auto n_eff = [](double lambda) { return 1.85 - 0.12 * (lambda - 1.55) - 0.03 * (lambda - 1.55) * (lambda - 1.55); };
  double worst = 0.0;
  int max_it = 0;
  for (int m : {360, 375, 390}) {
    const auto s = solve_resonance(m, R, 2.0, n_eff, cfg);
    // Bisection on g(f) = f n(c/f) - m c / (2π R).
    const double target = m * kSpeedOfLight / (kTwoPi * R * 1e-6);
    double lo = 1.5e14, hi = 2.5e14;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid * n_eff(wavelength_from_frequency(mid)) < target ? lo : hi) = mid;
    }
    worst = std::max(worst, std::abs(s.frequency_hz - 0.5 * (lo + hi)));
    max_it = std::max(max_it, s.iterations);
  }
  expect(worst < 1e6 && max_it <= 20, "fixed point off by " + num(worst) + " Hz");
  return "max deviation " + num(worst) + " Hz, max " + std::to_string(max_it) + " iterations";
}

std::string check_synthetic_comb(int) {
  const auto set = synthetic_comb(300, 40, 40, kOmega0, kD1, kD2);
  const auto profile = integrated_dispersion(set);
  expect(profile.d1() == kD1, "D1 not recovered exactly: " + num(profile.d1()));
  const auto fit = fit_quadratic(profile, WavelengthWindow{1.5, 1.6});
  const double e = rel(fit.q2, kD2 / 2.0);
  expect(e < 1e-9, "q2 relative error " + num(e));
  for (const auto& p : profile.points())
    if (p.mu == 0) expect(p.dint == 0.0, "D_int at the pump is not zero");
  return "D1 exact, q2 relative error " + num(e) + " over " + std::to_string(fit.points) + " modes";
}

std::string check_pump_invariant(int) {
  bool threw = false;
  try {
    DintProfile({{-1, 1.0, 1.0}, {0, 1e-3, 2.0}, {1, 1.0, 3.0}}, 1.0, 2.0);
  } catch (const Error&) {
    threw = true;
  }
  expect(threw, "a profile with nonzero D_int at the pump was accepted");
  return "nonzero pump value rejected";
}

std::string check_stump(int) {
  const Matrix X = Matrix::from_rows({{1}, {2}, {8}, {9}});
  const Matrix Y = Matrix::from_rows({{0}, {0}, {10}, {10}});
  Hyperparams hp;
  hp.max_depth = 1;
  const auto tree = fit_tree(X, Y, hp);
  const auto& root = tree.nodes().front();
  expect(root.feature == 0 && root.threshold == 5.0, "stump threshold " + num(root.threshold));
  expect(tree.predict({2})[0] == 0.0 && tree.predict({8})[0] == 10.0, "stump leaves");
  expect(tree.predict({5.0})[0] == 0.0, "value at the threshold is not routed left");

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_matrix(25, 1, rng, 0.0, 1.0);
    const auto y = random_matrix(25, 1, rng, -1.0, 1.0);
    const auto o = oracle::brute_force_stump(x.column(0), y.column(0));
    const auto t = fit_tree(x, y, hp);
    expect(t.nodes().front().threshold == o.threshold, "stump differs from brute force at trial " + std::to_string(trial));
  }
  return "threshold 5.0, leaves 0 and 10; 20 random stumps match brute force";
}

std::string check_memorization(int) {
  std::mt19937_64 rng(11);
  const auto X = random_matrix(120, 3, rng, 0.0, 1.0);
  const auto Y = random_matrix(120, 3, rng, 1.0, 2.0);
  Hyperparams hp;
  for (std::size_t o = 0; o < 3; ++o) {
    const auto y = Y.select_columns({o});
    const auto tree = fit_tree(X, y, hp);
    std::vector<double> pred;
    for (std::size_t i = 0; i < X.rows(); ++i) pred.push_back(tree.predict(X.row_vector(i))[0]);
    expect(mape(y.column(0), pred) == 0.0, "unlimited tree has nonzero training error");
  }
  return "training MAPE 0 on 120 random samples";
}

std::string check_forest_mean(int jobs) {
  std::mt19937_64 rng(5);
  const auto X = random_matrix(80, 3, rng, 0.0, 1.0);
  const auto Y = random_matrix(80, 2, rng, 0.0, 1.0);
  Hyperparams hp;
  hp.n_estimators = 17;
  hp.max_depth = 6;
  hp.seed = 99;
  const auto forest = fit_forest(X, Y, hp, jobs);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto x = random_matrix(1, 3, rng, 0.0, 1.0).row_vector(0);
    std::vector<double> sum(2, 0.0);
    for (const auto& t : forest.trees()) {
      const auto p = t.predict(x);
      sum[0] += p[0];
      sum[1] += p[1];
    }
    const auto f = forest.predict(x);
    expect(f[0] == sum[0] / 17.0 && f[1] == sum[1] / 17.0, "forest prediction is not the tree mean");
  }
  hp.n_estimators = 1;
  hp.bootstrap = false;
  const auto single = fit_forest(X, Y, hp, jobs);
  expect(single.trees().front().to_json() == fit_tree(X, Y, hp).to_json(), "degenerate forest differs from a tree");
  const auto again = fit_forest(X, Y, hp, 1);
  expect(again.trees().front().to_json() == single.trees().front().to_json(), "forest is not reproducible");
  return "exact mean over 17 trees; single unbagged tree identical to fit_tree";
}

std::string check_metrics(int) {
  const double m = mape({100, 2}, {90, 2.2});
  expect(std::abs(m - 10.0) < 1e-12, "MAPE fixture gave " + num(m));
  expect(mape({50}, {75}) == 50.0, "single-element MAPE");
  expect(nmae({1, 3}, {2, 2}) == -1.0, "NMAE fixture");
  bool threw = false;
  try {
    mape({0.0, 1.0}, {1.0, 1.0});
  } catch (const Error&) {
    threw = true;
  }
  expect(threw, "zero actual value did not raise");
  return "MAPE 10.0%, NMAE -1.0";
}

std::string check_kfold(int) {
  const auto folds = kfold_indices(346, 4, 3);
  std::vector<std::size_t> sizes;
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    sizes.push_back(f.size());
    seen.insert(f.begin(), f.end());
  }
  expect(sizes == std::vector<std::size_t>{87, 87, 86, 86}, "fold sizes");
  expect(seen.size() == 346, "folds are not a partition");
  const auto split = split_train_test(462, 0.75, 1);
  expect(split.train.size() == 346 && split.test.size() == 116, "462 split sizes");
  const auto again = split_train_test(462, 0.75, 1);
  expect(again.train == split.train, "split is not reproducible");
  const auto four = split_train_test(4, 0.75, 9);
  expect(four.train.size() == 3 && four.test.size() == 1, "N=4 split");
  return "folds 87/87/86/86, split 346/116";
}

std::string check_affine(int) {
  std::mt19937_64 rng(21);
  const auto X = random_matrix(90, 3, rng, 0.0, 10.0);
  const auto Y = random_matrix(90, 1, rng, 0.0, 5.0);
  const double alpha[3] = {3.5, 0.02, 1e4}, beta[3] = {-7.0, 100.0, 0.5}, gamma = 250.0, delta = -3.0;
  Matrix X2 = X, Y2 = Y;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) X2(i, c) = alpha[c] * X(i, c) + beta[c];
    Y2(i, 0) = gamma * Y(i, 0) + delta;
  }
  Hyperparams hp;
  hp.max_depth = 8;
  hp.min_samples_leaf = 2;
  const auto a = fit_tree(X, Y, hp), b = fit_tree(X2, Y2, hp);
  expect(a.nodes().size() == b.nodes().size(), "node count changed under rescaling");
  for (std::size_t k = 0; k < a.nodes().size(); ++k)
    expect(a.nodes()[k].feature == b.nodes()[k].feature, "split feature changed under rescaling");
  double worst = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    expect(a.leaf_of(X.row(i)) == b.leaf_of(X2.row(i)), "routing changed under rescaling");
    const double back = (b.predict(X2.row_vector(i))[0] - delta) / gamma;
    worst = std::max(worst, std::abs(back - a.predict(X.row_vector(i))[0]));
  }
  expect(worst < 1e-9, "predictions differ by " + num(worst) + " after the inverse transform");
  return std::to_string(a.nodes().size()) + " nodes invariant, max back-mapped difference " + num(worst);
}

std::string check_normalizer(int) {
  const std::vector<std::vector<double>> rows = {{1.0, 5.0, -2.0}, {3.0, 5.0, 8.0}, {2.0, 5.0, 0.5}};
  const auto n = MinMaxNormalizer::fit(rows);
  const auto lo = n.apply(rows[0]), hi = n.apply(rows[1]);
  expect(lo[0] == 0.0 && hi[0] == 1.0 && lo[2] == 0.0 && hi[2] == 1.0, "min/max do not map to 0/1");
  expect(lo[1] == 0.0 && n.invert(lo)[1] == 5.0, "constant column guard");
  for (const auto& r : rows) {
    const auto back = n.invert(n.apply(r));
    for (std::size_t c = 0; c < r.size(); ++c) expect(std::abs(back[c] - r[c]) <= 1e-12, "invert(apply(x)) != x");
  }
  return "0/1 endpoints, constant column, round trip within 1e-12";
}

std::string check_dataset_io(int) {
  const auto ds = synthetic_dataset();
  const auto back = parse_dataset_csv(dataset_csv(ds), "<selfcheck>");
  expect(back.size() == ds.size(), "row count");
  for (std::size_t i = 0; i < ds.size(); ++i)
    expect(back.records[i].geometry == ds.records[i].geometry && back.records[i].features == ds.records[i].features,
           "record " + std::to_string(i) + " changed in the CSV round trip");
  expect(dataset_csv(back) == dataset_csv(ds), "CSV text not reproduced");
  return std::to_string(ds.size()) + " records round-tripped exactly";
}

Model memorizing_model(const Dataset& ds) {
  TrainConfig cfg;
  cfg.kind = ModelKind::decision_tree;
  ParamGrid g;
  g.max_depth = {std::nullopt};
  g.min_samples_leaf = {1};
  cfg.param_grid = g;
  cfg.split_ratio = 0.95;
  cfg.folds = 2;
  auto result = train_model(ds, cfg, 1, 1);
  // Refit on every row so any training profile is memorized.
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto X = feature_matrix(ds, all), Y = target_matrix(ds, all);
  for (std::size_t t = 0; t < result.model.members.size(); ++t) {
    auto& m = result.model.members[t];
    m.forest = fit_forest(X, Y.select_columns({t}), m.hp, 1);
  }
  for (std::size_t c = 0; c < X.cols(); ++c) {
    const auto col = X.column(c);
    result.model.feature_min[c] = *std::min_element(col.begin(), col.end());
    result.model.feature_max[c] = *std::max_element(col.begin(), col.end());
  }
  return result.model;
}

std::string check_model_json(int) {
  const auto ds = synthetic_dataset();
  TrainConfig cfg;
  ParamGrid g;
  g.max_depth = {4};
  g.n_estimators = {7};
  cfg.param_grid = g;
  cfg.normalize = true;
  cfg.folds = 3;
  const auto model = train_model(ds, cfg, 42, 1).model;
  const auto back = model_from_json(nlohmann::json::parse(model_to_json(model).dump()));
  for (const auto& r : ds.records) expect(back.predict(r.features) == model.predict(r.features), "prediction changed");
  bool threw = false;
  try {
    auto j = model_to_json(model);
    j["per_target"]["radius_um"]["trees"][0] = {{"f", 9}};
    model_from_json(j);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::schema;
  }
  expect(threw, "corrupted model did not raise a schema error");
  return "bitwise predictions after save/load; corruption rejected";
}

std::string check_export_ingest(int) {
  int checked = 0;
  for (double d2 : {kD2, -kD2, 3e8}) {
    const auto profile = integrated_dispersion(synthetic_comb(250, 30, 35, kOmega0, kD1, d2, 1e5));
    const auto back = ingest_measured_text(export_measured(profile), wavelength_from_omega(profile.omega0())).profile;
    expect(profiles_match(profile, back), "export/ingest changed the profile");
    ++checked;
  }
  // Raw resonances of a perfect linear comb.
  std::string csv = "mode_index,resonance_hz\n";
  for (int m = 295; m <= 315; ++m) csv += std::to_string(m) + ',' + format_exact(6.4e11 * m) + '\n';
  const auto lin = ingest_measured_text(csv).profile;
  // Zero up to the rounding of ω itself.
  for (const auto& p : lin.points()) expect(std::abs(p.dint) < 1e-12 * lin.omega0(), "linear comb has nonzero D_int");
  return std::to_string(checked) + " profiles round-tripped; linear comb gives D_int = 0";
}

std::string check_memorized_prediction(int) {
  const auto ds = synthetic_dataset();
  const auto model = memorizing_model(ds);
  int k = 0;
  for (const auto& r : ds.records) {
    const auto comb = synthetic_comb(200, 40, 40, kOmega0, kD1 * 50.0 / r.geometry.radius_um, kTwoPi * 1e3 * (++k));
    const auto est = predict_geometry(model, integrated_dispersion(comb));
    expect(est.predicted == r.geometry, "memorized geometry not recovered for record " + std::to_string(k - 1));
  }
  return std::to_string(k) + " training profiles mapped to their exact geometry";
}

std::string check_sensitivity_zero(int jobs) {
  ForwardConfig fwd;
  fwd.mode.nx = fwd.mode.ny = 48;
  fwd.resonance.band = {1.45, 1.65};
  SensitivityConfig cfg;
  cfg.delta = 0.0;
  const auto rep = sensitivity_analysis({60.0, 1.5, 0.65}, fwd, cfg, jobs);
  for (const auto& e : rep.entries) expect(e.mape_percent == 0.0, e.parameter + " MAPE " + num(e.mape_percent));
  expect(rep.entries[0].parameter == "radius" && rep.entries[1].parameter == "height" &&
             rep.entries[2].parameter == "width",
         "parameter order");
  return "delta 0 gives exactly 0% for radius, height, width";
}

struct NamedCheck {
  const char* name;
  CheckFn fn;
};

constexpr NamedCheck kChecks[] = {
    {"grid.reference_462", check_grid},
    {"material.sellmeier_literal", check_sellmeier},
    {"modesolver.box_laplacian", check_box},
    {"modesolver.slab", check_slab},
    {"resonance.dispersionless", check_dispersionless},
    {"resonance.fixed_point", check_fixed_point},
    {"dispersion.synthetic_comb", check_synthetic_comb},
    {"dispersion.pump_zero", check_pump_invariant},
    {"ml.stump", check_stump},
    {"ml.memorization", check_memorization},
    {"ml.forest_mean", check_forest_mean},
    {"ml.metrics", check_metrics},
    {"ml.kfold_split", check_kfold},
    {"ml.affine_invariance", check_affine},
    {"dataset.normalizer", check_normalizer},
    {"dataset.csv_roundtrip", check_dataset_io},
    {"model.json_roundtrip", check_model_json},
    {"inverse.export_ingest", check_export_ingest},
    {"inverse.memorized_prediction", check_memorized_prediction},
    {"inverse.sensitivity_zero", check_sensitivity_zero},
};

}  // namespace

std::vector<CheckResult> run_selfcheck(const CheckCallback& on_result, int jobs) {
  std::vector<CheckResult> out;
  for (const auto& c : kChecks) {
    CheckResult r;
    r.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.detail = c.fn(jobs);
      r.passed = true;
    } catch (const Failure& f) {
      r.detail = f.what;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mrdesign
