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
// mrdesign command line front end. Talks to the library only through the C
// interface; nlohmann json is used to merge flags into the run config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrdesign/mrdesign.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSelfcheck = 3;

const char* kExitFooter =
    "Exit codes:\n"
    "  0  success\n"
    "  1  runtime or solver failure (non-convergence, unguided mode, domain,\n"
    "     inconsistent resonances, too many rejects, file i/o)\n"
    "  2  usage or configuration error (bad flag, unknown config key,\n"
    "     malformed dataset/model/measured file)\n"
    "  3  selfcheck failure";

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(mrd_status st) {
  switch (st) {
    case MRD_OK: return kExitOk;
    case MRD_ERR_INVALID_ARGUMENT:
    case MRD_ERR_CONFIG:
    case MRD_ERR_SCHEMA: return kExitUsage;
    case MRD_ERR_SELFCHECK: return kExitSelfcheck;
    default: return kExitRuntime;
  }
}

// Owning wrappers for the opaque handles and returned strings.
struct SessionDel {
  void operator()(mrd_session* s) const { mrd_session_destroy(s); }
};
struct ProfileDel {
  void operator()(mrd_profile* p) const { mrd_profile_destroy(p); }
};
struct DatasetDel {
  void operator()(mrd_dataset* d) const { mrd_dataset_destroy(d); }
};
struct ModelDel {
  void operator()(mrd_model* m) const { mrd_model_destroy(m); }
};
using Session = std::unique_ptr<mrd_session, SessionDel>;
using Profile = std::unique_ptr<mrd_profile, ProfileDel>;
using DatasetH = std::unique_ptr<mrd_dataset, DatasetDel>;
using ModelH = std::unique_ptr<mrd_model, ModelDel>;

std::string take(char* s) {
  if (!s) return {};
  std::string out(s);
  mrd_string_free(s);
  return out;
}

void check(mrd_session* s, mrd_status st, const std::string& what) {
  if (st == MRD_OK) return;
  std::string msg = what + ": " + mrd_status_string(st);
  if (s) {
    const std::string detail = mrd_session_last_error(s);
    if (!detail.empty()) msg += ": " + detail;
  }
  throw CliError{exit_code_for(st), msg};
}

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  int verbosity = 1;
};

struct Geo {
  double radius = 0, width = 0, height = 0;
};

class Runner {
 public:
  explicit Runner(Globals g) : g_(std::move(g)) {}

  // Loads the config file (if any), applies `patch`, opens a session.
  Session open(const nlohmann::json& patch = nlohmann::json::object()) {
    nlohmann::json cfg = nlohmann::json::object();
    std::string base = ".";
    if (!g_.config_path.empty()) {
      std::ifstream in(g_.config_path);
      if (!in) throw CliError{kExitUsage, "cannot read config file " + g_.config_path};
      try {
        cfg = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw CliError{kExitUsage, "config " + g_.config_path + " is not valid JSON: " + e.what()};
      }
      if (!cfg.is_object()) throw CliError{kExitUsage, "config root must be an object"};
      base = fs::path(g_.config_path).parent_path().string();
      if (base.empty()) base = ".";
    }
    cfg.merge_patch(patch);
    mrd_session* raw = nullptr;
    char* err = nullptr;
    const auto st = mrd_session_create(cfg.dump().c_str(), base.c_str(), &raw, &err);
    const std::string msg = take(err);
    if (st != MRD_OK) throw CliError{exit_code_for(st), std::string("config: ") + msg};
    Session s(raw);
    if (g_.seed) check(s.get(), mrd_session_set_seed(s.get(), *g_.seed), "seed");
    if (g_.jobs) check(s.get(), mrd_session_set_jobs(s.get(), *g_.jobs), "jobs");
    return s;
  }

  fs::path out(const std::string& name) const {
    fs::path dir(g_.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{kExitRuntime, "cannot create output directory " + dir.string() + ": " + ec.message()};
    return dir / name;
  }

  void write(const std::string& name, const std::string& content) const {
    const auto path = out(name);
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw CliError{kExitRuntime, "cannot write " + path.string()};
    note("wrote " + path.string());
  }

  void note(const std::string& msg) const {
    if (g_.verbosity > 0) std::cerr << msg << '\n';
  }
  int verbosity() const { return g_.verbosity; }

 private:
  Globals g_;
};

Profile simulate_profile(mrd_session* s, const Geo& g) {
  mrd_profile* raw = nullptr;
  check(s, mrd_simulate(s, g.radius, g.width, g.height, &raw), "simulate");
  return Profile(raw);
}

ModelH load_model(mrd_session* s, const std::string& path) {
  mrd_model* raw = nullptr;
  check(s, mrd_model_load(s, path.c_str(), &raw), "load model " + path);
  return ModelH(raw);
}

DatasetH load_dataset(mrd_session* s, const std::string& path) {
  mrd_dataset* raw = nullptr;
  check(s, mrd_dataset_load(s, path.c_str(), &raw), "load dataset " + path);
  return DatasetH(raw);
}

void progress_cb(size_t done, size_t total, void*) {
  if (done == total || done % 10 == 0) {
    std::fprintf(stderr, "\r  %zu/%zu", done, total);
    if (done == total) std::fputc('\n', stderr);
    std::fflush(stderr);
  }
}

void add_geometry(CLI::App* cmd, Geo& g, bool required) {
  auto* r = cmd->add_option("--radius", g.radius, "ring radius [um]")->check(CLI::PositiveNumber);
  auto* w = cmd->add_option("--width", g.width, "waveguide width [um]")->check(CLI::PositiveNumber);
  auto* h = cmd->add_option("--height", g.height, "waveguide height [um]")->check(CLI::PositiveNumber);
  if (required) {
    r->required();
    w->required();
    h->required();
  } else {
    r->needs(w, h);
    w->needs(r, h);
    h->needs(r, w);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrdesign: ring-resonator dispersion simulation and geometry inverse design"};
  app.footer(kExitFooter);
  app.set_version_flag("--version", std::string(mrd_version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("-c,--config", g.config_path, "run configuration JSON")->check(CLI::ExistingFile);
  app.add_option("-o,--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "master seed (overrides config)");
  app.add_option("-j,--jobs", g.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", [&](std::int64_t n) { g.verbosity = 1 + static_cast<int>(n); }, "more output");
  app.add_flag("-q,--quiet", [&](std::int64_t) { g.verbosity = 0; }, "no progress output");

  auto sub = [&](const char* name, const char* desc) {
    auto* c = app.add_subcommand(name, desc);
    c->fallthrough();
    c->footer(kExitFooter);
    return c;
  };

  Geo sim_geo;
  auto* simulate = sub("simulate", "solve one geometry: dint.csv, fsr.csv, measured.csv, summary.json");
  add_geometry(simulate, sim_geo, true);

  auto* sweep = sub("sweep", "simulate the configured grid: dataset.csv + dataset.meta.json");

  std::string train_dataset, train_kind;
  bool train_multi = false, train_norm = false;
  std::optional<int> train_folds;
  auto* train = sub("train", "grid search + k-fold CV + final fit: model.json, grid_table.csv");
  train->add_option("-d,--dataset", train_dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  train->add_option("-m,--model", train_kind, "rf or dt (overrides config)")->check(CLI::IsMember({"rf", "dt"}));
  train->add_flag("--multi-output", train_multi, "one forest for all targets");
  train->add_flag("--normalize", train_norm, "min-max scale features and targets");
  train->add_option("--folds", train_folds, "cross-validation folds")->check(CLI::Range(2, 100));

  std::string eval_model, eval_dataset;
  auto* evaluate = sub("evaluate", "test-split metrics: metrics.json, ape.csv, nmae_vs_trees.csv");
  evaluate->add_option("-m,--model", eval_model, "model JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-d,--dataset", eval_dataset, "dataset CSV the model was trained on")
      ->required()
      ->check(CLI::ExistingFile);

  std::string pred_model, pred_profile;
  double pred_pump = 1.557;
  Geo pred_geo;
  auto* predict = sub("predict", "estimate geometry from a profile: prediction.json");
  predict->add_option("-m,--model", pred_model, "model JSON")->required()->check(CLI::ExistingFile);
  auto* prof_opt = predict->add_option("-p,--profile", pred_profile,
                                       "measured CSV (wavelength_nm,dint_hz or mode_index,resonance_hz)")
                       ->check(CLI::ExistingFile);
  predict->add_option("--pump-um", pred_pump, "pump wavelength for measured profiles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_geometry(predict, pred_geo, false);
  prof_opt->excludes(predict->get_option("--radius"));

  Geo sens_geo;
  std::optional<double> sens_delta;
  auto* sensitivity = sub("sensitivity", "D_int change under +delta per parameter: sensitivity.json");
  add_geometry(sensitivity, sens_geo, true);
  sensitivity->add_option("--delta", sens_delta, "relative perturbation (overrides config)")
      ->check(CLI::NonNegativeNumber);

  auto* selfcheck = sub("selfcheck", "run the built-in oracle checks");
  auto* config = sub("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Runner run(g);
  try {
    if (*simulate) {
      auto s = run.open();
      auto p = simulate_profile(s.get(), sim_geo);
      char* txt = nullptr;
      check(s.get(), mrd_profile_dint_csv(p.get(), &txt), "dint");
      run.write("dint.csv", take(txt));
      check(s.get(), mrd_profile_fsr_csv(p.get(), &txt), "fsr");
      run.write("fsr.csv", take(txt));
      check(s.get(), mrd_profile_export_measured(p.get(), &txt), "export");
      run.write("measured.csv", take(txt));
      check(s.get(), mrd_profile_summary_json(s.get(), p.get(), &txt), "summary");
      run.write("summary.json", take(txt) + "\n");
    } else if (*sweep) {
      auto s = run.open();
      mrd_dataset* raw = nullptr;
      check(s.get(), mrd_dataset_generate(s.get(), run.verbosity() > 0 ? progress_cb : nullptr, nullptr, &raw),
            "sweep");
      DatasetH ds(raw);
      const auto path = run.out("dataset.csv");
      check(s.get(), mrd_dataset_save(s.get(), ds.get(), path.string().c_str()), "save dataset");
      run.note("wrote " + path.string() + " (" + std::to_string(mrd_dataset_size(ds.get())) + " rows, " +
               std::to_string(mrd_dataset_reject_count(ds.get())) + " rejects)");
    } else if (*train) {
      nlohmann::json patch = nlohmann::json::object();
      if (!train_kind.empty()) patch["training"]["model"] = train_kind;
      if (train_multi) patch["training"]["multi_output"] = true;
      if (train_norm) patch["training"]["normalize"] = true;
      if (train_folds) patch["training"]["folds"] = *train_folds;
      auto s = run.open(patch);
      auto ds = load_dataset(s.get(), train_dataset);
      mrd_model* raw = nullptr;
      check(s.get(), mrd_model_train(s.get(), ds.get(), &raw), "train");
      ModelH m(raw);
      const auto path = run.out("model.json");
      check(s.get(), mrd_model_save(s.get(), m.get(), path.string().c_str()), "save model");
      run.note("wrote " + path.string());
      char* txt = nullptr;
      check(s.get(), mrd_model_grid_table_csv(m.get(), &txt), "grid table");
      run.write("grid_table.csv", take(txt));
    } else if (*evaluate) {
      auto s = run.open();
      auto m = load_model(s.get(), eval_model);
      auto ds = load_dataset(s.get(), eval_dataset);
      char *metrics = nullptr, *ape = nullptr, *nmae = nullptr;
      check(s.get(), mrd_evaluate(s.get(), m.get(), ds.get(), &metrics, &ape, &nmae), "evaluate");
      const std::string metrics_s = take(metrics);
      run.write("metrics.json", metrics_s + "\n");
      run.write("ape.csv", take(ape));
      run.write("nmae_vs_trees.csv", take(nmae));
      if (run.verbosity() > 0) std::cout << metrics_s << '\n';
    } else if (*predict) {
      auto s = run.open();
      auto m = load_model(s.get(), pred_model);
      std::string report;
      char* txt = nullptr;
      if (!pred_profile.empty()) {
        mrd_profile* raw = nullptr;
        check(s.get(), mrd_profile_read_measured(s.get(), pred_profile.c_str(), pred_pump, &raw),
              "read " + pred_profile);
        Profile p(raw);
        check(s.get(), mrd_predict_geometry(s.get(), m.get(), p.get(), nullptr, &txt), "predict");
      } else if (pred_geo.radius > 0) {
        check(s.get(), mrd_round_trip(s.get(), m.get(), pred_geo.radius, pred_geo.width, pred_geo.height, &txt),
              "predict");
      } else {
        throw CliError{kExitUsage, "predict needs --profile or --radius/--width/--height"};
      }
      report = take(txt);
      run.write("prediction.json", report + "\n");
      if (run.verbosity() > 0) std::cout << report << '\n';
    } else if (*sensitivity) {
      auto s = run.open();
      char* txt = nullptr;
      check(s.get(),
            mrd_sensitivity(s.get(), sens_geo.radius, sens_geo.width, sens_geo.height, sens_delta.value_or(-1.0),
                            &txt),
            "sensitivity");
      const std::string report = take(txt);
      run.write("sensitivity.json", report + "\n");
      if (run.verbosity() > 0) std::cout << report << '\n';
    } else if (*selfcheck) {
      auto s = run.open();
      int failures = 0;
      const int verbose = run.verbosity();
      auto cb = [](const char* name, int passed, const char* detail, double seconds, void* user) {
        const int v = *static_cast<const int*>(user);
        if (v > 0 || !passed)
          std::printf("%s %-32s %7.2fs  %s\n", passed ? "PASS" : "FAIL", name, seconds, detail);
        std::fflush(stdout);
      };
      const auto st = mrd_selfcheck(s.get(), cb, const_cast<int*>(&verbose), &failures);
      if (st == MRD_ERR_SELFCHECK) {
        std::printf("%d check(s) failed\n", failures);
        return kExitSelfcheck;
      }
      check(s.get(), st, "selfcheck");
      std::printf("all checks passed\n");
    } else if (*config) {
      auto s = run.open();
      char* txt = nullptr;
      check(s.get(), mrd_session_config_json(s.get(), &txt), "config");
      std::cout << take(txt) << '\n';
    }
  } catch (const CliError& e) {
    std::cerr << "mrdesign: " << e.message << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "mrdesign: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
