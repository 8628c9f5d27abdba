// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oed/config.hpp"
#include "oed/runner.hpp"

using namespace oed;
using config::ExperimentConfig;
using config::Json;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("oedkit_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

Json toy_config(const fs::path& out_dir) {
  return Json{
      {"problem", {{"kind", "toy_diag"}, {"variances", {4.0, 3.0, 2.0, 1.0}}}},
      {"noise", {{"sigma", 1.0}}},
      {"design",
       {{"criterion", "A"},
        {"penalty", {{"kind", "reweighted_l1"}, {"gamma", 0.0}}},
        {"k", 2}}},
      {"seeds", {{"root", 42}}},
      {"output_dir", out_dir.string()}};
}

Json seird_config(const fs::path& out_dir) {
  return Json{{"problem",
               {{"kind", "seird"},
                {"n_beta", 5},
                {"rk_steps", 80},
                {"candidate_times", {{"mode", "uniform"}, {"count", 4}}}}},
              {"noise", {{"sigma", 0.01}}},
              {"design", {{"n_d", 4}, {"k", 2}}},
              {"seeds", {{"root", 7}}},
              {"output_dir", out_dir.string()}};
}

}  // namespace

TEST_CASE("config validation") {
  SUBCASE("defaults are materialized into the echo") {
    const auto config = ExperimentConfig::from_json(toy_config("x"));
    CHECK(config.echo().at("design").at("estimator").at("route") ==
          "measurement_space");
    CHECK(config.echo().at("design").at("optimizer").at("max_iterations") == 500);
    CHECK(config.echo().at("noise").at("sigma") == 1.0);
    CHECK(config.root_seed() == 42);
    REQUIRE(config.budget().has_value());
    CHECK(*config.budget() == 2);
  }

  SUBCASE("unknown keys are rejected") {
    Json bad = toy_config("x");
    bad["problem"]["typo_key"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

    Json bad_nested = toy_config("x");
    bad_nested["design"]["estimator"] = Json{{"rout", "exact_dense"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_nested), ConfigError);
  }

  SUBCASE("bad values are rejected") {
    Json bad = toy_config("x");
    bad["noise"]["sigma"] = -1.0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

    Json bad_kind = toy_config("x");
    bad_kind["problem"]["kind"] = "unknown_model";
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_kind), ConfigError);

    Json bad_route = toy_config("x");
    bad_route["design"]["estimator"] = Json{{"route", "also_unknown"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_route), ConfigError);
  }

  SUBCASE("missing problem block") {
    CHECK_THROWS_AS(ExperimentConfig::from_json(Json::object()), ConfigError);
  }
}

TEST_CASE("linear-oed run artifacts and determinism") {
  const fs::path dir = fresh_dir("linear");
  const auto config = ExperimentConfig::from_json(toy_config(dir));

  const auto outcome = runner::cmd_linear_oed(config);
  REQUIRE(outcome.exit_code == runner::kExitOk);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "design.csv"));

  const auto& results = outcome.report.at("results");
  CHECK(results.at("phi_relaxed").get<double>() <
        results.at("phi_empty").get<double>());
  CHECK(results.at("phi_binary").get<double>() <
        results.at("phi_empty").get<double>());
  // Budgeted toy run selects the two largest prior variances.
  CHECK(results.at("active_set") == Json::array({0, 1}));

  // Byte-identical reports modulo the timing block.
  const auto second = runner::cmd_linear_oed(config);
  CHECK(runner::stable_report(outcome.report).dump() ==
        runner::stable_report(second.report).dump());
  CHECK(outcome.report.contains("timing"));

  fs::remove_all(dir);
}

TEST_CASE("dry run validates and writes nothing") {
  const fs::path dir = fresh_dir("dry");
  const auto config = ExperimentConfig::from_json(toy_config(dir));
  const auto outcome = runner::cmd_linear_oed(config, /*dry_run=*/true);
  CHECK(outcome.exit_code == runner::kExitOk);
  CHECK(outcome.report.at("dry_run") == true);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("greedy command") {
  const fs::path dir = fresh_dir("greedy");
  Json raw = toy_config(dir);
  raw["design"].erase("k");
  const auto config = ExperimentConfig::from_json(raw);

  SUBCASE("requires a budget") {
    const auto outcome = runner::cmd_greedy(config);
    CHECK(outcome.exit_code == runner::kExitValidation);
  }

  SUBCASE("records a monotone step sequence") {
    const auto outcome = runner::cmd_greedy(config, Index{3});
    REQUIRE(outcome.exit_code == runner::kExitOk);
    const auto& steps = outcome.report.at("results").at("steps");
    REQUIRE(steps.size() == 3);
    double previous = outcome.report.at("results").at("phi_empty").get<double>();
    for (const auto& step : steps) {
      const double phi = step.at("phi").get<double>();
      CHECK(phi <= previous + 1e-12);
      previous = phi;
    }
    CHECK(steps[0].at("sensor") == 0);  // largest prior variance first
  }
  fs::remove_all(dir);
}

TEST_CASE("nonlinear-oed smoke run") {
  const fs::path dir = fresh_dir("seird");
  const auto config = ExperimentConfig::from_json(seird_config(dir));
  const auto outcome = runner::cmd_nonlinear_oed(config);
  REQUIRE(outcome.exit_code == runner::kExitOk);

  const auto& results = outcome.report.at("results");
  CHECK(results.at("selected_times").size() == 2);
  CHECK(results.at("risk").get<double>() > 0.0);
  CHECK(results.at("risk_failed_samples") == 0);
  CHECK(fs::exists(dir / "time_design.csv"));
  CHECK(fs::exists(dir / "trajectory.csv"));

  // Deterministic given (config, seed).
  const auto second = runner::cmd_nonlinear_oed(config);
  CHECK(runner::stable_report(outcome.report).dump() ==
        runner::stable_report(second.report).dump());
  fs::remove_all(dir);
}

TEST_CASE("export-field") {
  const fs::path dir = fresh_dir("export");
  Json raw = Json{
      {"problem",
       {{"kind", "advection_diffusion"},
        {"nx", 8},
        {"ny", 8},
        {"sensors", {{"mode", "lattice"}, {"nx", 3}, {"ny", 3}}}}},
      {"seeds", {{"root", 5}}},
      {"output_dir", dir.string()}};
  const auto config = ExperimentConfig::from_json(raw);

  const auto outcome = runner::cmd_export_field(config, "prior-sample",
                                                (dir / "sample.csv").string());
  REQUIRE(outcome.exit_code == runner::kExitOk);

  std::ifstream in(dir / "sample.csv");
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 9);  // header + 8 grid rows

  const auto bad = runner::cmd_export_field(config, "no-such-field", "");
  CHECK(bad.exit_code == runner::kExitValidation);
  fs::remove_all(dir);
}

#ifdef OEDKIT_BIN
TEST_CASE("oedkit binary end to end") {
  const fs::path dir = fresh_dir("bin");
  fs::create_directories(dir);
  const fs::path config_path = dir / "toy.json";
  {
    std::ofstream out(config_path);
    out << toy_config(dir / "out").dump(2);
  }
  const std::string bin = OEDKIT_BIN;

  auto run = [&](const std::string& args) {
    const std::string command = bin + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(command.c_str()));
  };

  CHECK(run("linear-oed --config " + config_path.string() + " --dry-run") == 0);
  CHECK(run("linear-oed --config " + config_path.string()) == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(run("greedy --config " + config_path.string() + " --k 2") == 0);
  CHECK(run("linear-oed --config /no/such/file.json") == 1);
  CHECK(run("verify") == 0);

  // Unknown config key: validation exit code.
  const fs::path bad_path = dir / "bad.json";
  {
    Json bad = toy_config(dir / "out2");
    bad["not_a_block"] = 1;
    std::ofstream out(bad_path);
    out << bad.dump(2);
  }
  CHECK(run("linear-oed --config " + bad_path.string()) == 1);
  fs::remove_all(dir);
}
#endif
