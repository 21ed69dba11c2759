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
// Runs the mrdesign executable end to end on a toy configuration.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "mrd_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& args, std::string* output = nullptr) {
  const auto log = kWork / "last_output.txt";
  const std::string cmd = std::string(MRDESIGN_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  if (output) *output = slurp(log);
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path toy_config() {
  fs::create_directories(kWork);
  const auto p = kWork / "toy.json";
  std::ofstream(p) << R"({
  "seed": 11,
  "mode_solver": {"nx": 40, "ny": 40},
  "resonance": {"band_um": [1.45, 1.65]},
  "grid": {"radii_um": [40, 80], "widths_um": [1.2, 1.8], "heights_um": [0.6, 0.7]},
  "training": {"folds": 2, "param_grid": {"max_depth": [3, null], "n_estimators": [4, 6]}},
  "evaluation": {"nmae_trees": [1, 2, 4, 6]}
})";
  return p;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("help lists the exit codes") {
  fs::create_directories(kWork);
  std::string out;
  CHECK(run("--help", &out) == 0);
  CHECK(out.find("Exit codes") != std::string::npos);
  CHECK(out.find("3  selfcheck failure") != std::string::npos);
  CHECK(run("--version", &out) == 0);
}

TEST_CASE("usage errors exit 2") {
  fs::create_directories(kWork);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate --radius 50 --width -1 --height 0.6") == 2);
  CHECK(run("simulate --radius 50 --width 1.5") == 2);
  CHECK(run("train --dataset /nonexistent.csv") == 2);
  CHECK(run("predict --model /nonexistent.json") == 2);
  const auto bad = kWork / "bad.json";
  std::ofstream(bad) << R"({"mode_solver": {"nz": 3}})";
  std::string out;
  CHECK(run("-c " + q(bad) + " simulate --radius 50 --width 1.5 --height 0.6", &out) == 2);
  CHECK(out.find("nz") != std::string::npos);
}

TEST_CASE("solver failures exit 1") {
  const auto cfg = kWork / "unguided.json";
  fs::create_directories(kWork);
  std::ofstream(cfg) << R"({"mode_solver": {"nx": 24, "ny": 24, "core_material": "SiO2"}})";
  CHECK(run("-c " + q(cfg) + " -o " + q(kWork / "unguided") + " simulate --radius 50 --width 1.5 --height 0.6") == 1);
}

TEST_CASE("simulate writes plot data and is byte-reproducible") {
  const auto cfg = toy_config();
  const auto a = kWork / "sim_a", b = kWork / "sim_b";
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(a) + " simulate --radius 60 --width 1.5 --height 0.65") == 0);
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(b) + " simulate --radius 60 --width 1.5 --height 0.65") == 0);
  for (const char* f : {"dint.csv", "fsr.csv", "measured.csv", "summary.json"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "dint.csv").rfind("mu,dint_hz\n", 0) == 0);
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(summary["geometry"]["radius_um"] == 60.0);
}

TEST_CASE("sweep, train, evaluate, predict on a 2x2x2 grid") {
  const auto cfg = toy_config();
  const auto d1 = kWork / "pipe1", d2 = kWork / "pipe2";
  for (const auto& [dir, jobs] : {std::pair{d1, 1}, std::pair{d2, 2}}) {
    const std::string base = "-q -c " + q(cfg) + " -o " + q(dir) + " -j " + std::to_string(jobs) + " ";
    REQUIRE(run(base + "sweep") == 0);
    REQUIRE(run(base + "train --dataset " + q(dir / "dataset.csv")) == 0);
    REQUIRE(run(base + "evaluate --model " + q(dir / "model.json") + " --dataset " + q(dir / "dataset.csv")) == 0);
  }
  for (const char* f : {"dataset.csv", "dataset.meta.json", "model.json", "grid_table.csv", "metrics.json", "ape.csv",
                        "nmae_vs_trees.csv"}) {
    CHECK(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  const auto metrics = nlohmann::json::parse(slurp(d1 / "metrics.json"));
  for (const char* t : {"radius_um", "width_um", "height_um"})
    CHECK(metrics["per_target"][t]["mape_percent"].is_number());

  // Predict from a simulated profile file and from geometry flags.
  const auto sim = kWork / "pipe_sim";
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(sim) + " simulate --radius 40 --width 1.2 --height 0.6") == 0);
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(sim) + " predict --model " + q(d1 / "model.json") + " --profile " +
              q(sim / "measured.csv")) == 0);
  const auto pred = nlohmann::json::parse(slurp(sim / "prediction.json"));
  CHECK(pred["predicted"]["radius_um"].is_number());
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(sim) + " predict --model " + q(d1 / "model.json") +
              " --radius 40 --width 1.2 --height 0.6") == 0);
  CHECK(nlohmann::json::parse(slurp(sim / "prediction.json")).contains("dint_rms_hz"));

  // Train with the decision tree and the model flag.
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(kWork / "pipe_dt") + " train --model dt --dataset " +
              q(d1 / "dataset.csv")) == 0);
  CHECK(nlohmann::json::parse(slurp(kWork / "pipe_dt" / "model.json"))["kind"] == "dt");

  // Corrupted model file is a schema error.
  std::ofstream(kWork / "broken.json") << "{\"schema_version\": 1}";
  CHECK(run("-q -c " + q(cfg) + " -o " + q(sim) + " evaluate --model " + q(kWork / "broken.json") + " --dataset " +
            q(d1 / "dataset.csv")) == 2);
}

TEST_CASE("sensitivity writes its report") {
  const auto cfg = toy_config();
  const auto out = kWork / "sens";
  REQUIRE(run("-q -c " + q(cfg) + " -o " + q(out) + " sensitivity --radius 60 --width 1.5 --height 0.65 --delta 0") == 0);
  const auto j = nlohmann::json::parse(slurp(out / "sensitivity.json"));
  for (const auto& e : j["parameters"]) CHECK(e["dint_mape_percent"] == 0.0);
}

TEST_CASE("selfcheck exits 0") {
  std::string out;
  CHECK(run("selfcheck", &out) == 0);
  CHECK(out.find("all checks passed") != std::string::npos);
}
