/*
 Copyright 2026 The resilo Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "resilo/commands.hpp"
#include "support/schema.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace resilo;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = RESILO_SOURCE_DIR;

fs::path scratch(const std::string &name) {
  auto p = fs::temp_directory_path() / ("resilo_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_text(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json schema(const std::string &name) {
  return testing::read_json_file(kRoot + "/schemas/" + name + "_report.schema.json");
}

} // namespace

TEST_CASE("configs round trip through the canonical dump") {
  for (const char *file : {"robot.json", "acc_linear.json", "acc_poly2.json"}) {
    const auto cfg = load_config(kRoot + "/configs/" + file);
    const auto again = parse_config(Json::parse(canonical_dump(cfg)));
    CHECK(again == cfg);
    CHECK(canonical_dump(again) == canonical_dump(cfg));
    CHECK(config_hash(again) == config_hash(cfg));
  }
  CHECK(load_config(kRoot + "/configs/robot.json") == robot_config());
  CHECK(load_config(kRoot + "/configs/acc_linear.json") == acc_config(false, 100, 0));
  CHECK(load_config(kRoot + "/configs/acc_poly2.json") == acc_config(true, 100, 0));
}

TEST_CASE("strict parsing") {
  auto j = to_json(robot_config());
  CHECK_NOTHROW(parse_config(j));
  auto bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = j;
  bad["solver"]["startz"] = 3;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = j;
  bad["x0"] = Json::array({0.0});
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = j;
  bad["horizon"] = 3;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = j;
  bad["spec"] = {{"op", "until"}, {"args", Json::array()}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = j;
  bad["controller"]["alpha"] = Json::array({1, 2});
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = j;
  bad["system"]["A"] = Json::array({Json::array({1, 0}), Json::array({0})});
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("infinite sentinel") {
  Json j = Json::parse(R"({"lower": ["-inf", 0], "upper": ["inf", 1]})");
  CHECK(number_from_json(j["lower"][0], "x") == -kInf);
  CHECK(json_number(kInf) == "inf");
  CHECK(json_number(-kInf) == "-inf");
  CHECK(json_number(0.5) == 0.5);
  CHECK_THROWS_AS(number_from_json(Json("infinity"), "x"), ConfigError);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-6) == "1e-06");
}

TEST_CASE("exact command") {
  const auto dir = scratch("exact");
  std::ostringstream out, err;
  CHECK(cmd_exact(kRoot + "/configs/robot.json", dir.string(), out, err) == kExitOk);
  const auto report = testing::read_json_file((dir / "report.json").string());
  CHECK(testing::schema_error(schema("exact"), report) == "");
  CHECK(report["epsilon"].get<double>() >= 0.0676);
  CHECK(canonical_dump(parse_config(report["config"])) == report["config"].dump());
  CHECK(report["config_hash"] == config_hash(parse_config(report["config"])));
  const auto csv = read_text(dir / "trajectories.csv");
  CHECK(csv.rfind("run_id,k,x_1,x_2,u_1,u_2\r\n", 0) == 0);
}

TEST_CASE("exact command exit codes") {
  std::ostringstream out, err;
  const auto dir = scratch("codes");
  CHECK(cmd_exact(kRoot + "/tests/fixtures/or_spec.json", dir.string(), out, err) ==
        kExitNotProduct);
  CHECK(err.str().find("scenario") != std::string::npos);
  CHECK(cmd_exact(kRoot + "/tests/fixtures/infeasible_start.json", dir.string(), out, err) ==
        kExitNominalInfeasible);
  CHECK(cmd_exact(kRoot + "/tests/fixtures/unknown_key.json", dir.string(), out, err) ==
        kExitUsage);
  CHECK(cmd_exact(kRoot + "/configs/acc_linear.json", dir.string(), out, err) == kExitUsage);
  CHECK(cmd_exact(kRoot + "/tests/fixtures/unconstrained.json", dir.string(), out, err) ==
        kExitOk);
  const auto report = testing::read_json_file((dir / "report.json").string());
  CHECK(report["epsilon"] == "inf");
  CHECK(report["status"] == "unbounded");
}

TEST_CASE("bound command") {
  std::ostringstream out, err;
  CHECK(cmd_bound(10, 10, 0.5, out, err) == kExitOk);
  CHECK(out.str() == "1.000000\n");
  out.str("");
  CHECK(cmd_bound(9, 500, 1e-2, out, err) == kExitOk);
  CHECK(std::abs(std::stod(out.str()) - 0.046) <= 5e-3);
  out.str("");
  CHECK(cmd_bound(0, 100, 1e-2, out, err) == kExitOk);
  const double b0 = std::stod(out.str());
  CHECK(b0 > 0.0);
  CHECK(b0 < 1.0);
  CHECK(cmd_bound(11, 10, 0.5, out, err) == kExitUsage);
  CHECK(err.str().find("usage") != std::string::npos);
}

TEST_CASE("scenario command on a one-scenario toy") {
  Json j = Json::parse(read_text(kRoot + "/tests/fixtures/unknown_key.json"));
  j.erase("horizn");
  j["solver"] = {{"scenarios", 1}, {"random_starts", 2}, {"betas", {0.01, 0.0001, 1e-6}}};
  const auto dir = scratch("scenario_toy");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "cfg.json");
    f << j.dump();
  }
  std::ostringstream out, err;
  CHECK(cmd_scenario((dir / "cfg.json").string(), (dir / "out").string(), out, err) == kExitOk);
  const auto report = testing::read_json_file((dir / "out" / "report.json").string());
  CHECK(testing::schema_error(schema("scenario"), report) == "");
  const int s = report["complexity"];
  CHECK((s == 0 || s == 1));
  const auto &bounds = report["table"]["bound"];
  CHECK(bounds.size() == 3);
  const double b2 = bounds.at(format_double(1e-2)).get<double>();
  const double b4 = bounds.at(format_double(1e-4)).get<double>();
  const double b6 = bounds.at(format_double(1e-6)).get<double>();
  CHECK(b2 <= b4);
  CHECK(b4 <= b6);
}

TEST_CASE("scenario command on the acc config") {
  const auto dir = scratch("scenario_acc");
  std::ostringstream out, err;
  CHECK(cmd_scenario(kRoot + "/configs/acc_linear.json", dir.string(), out, err) == kExitOk);
  const auto report = testing::read_json_file((dir / "report.json").string());
  CHECK(testing::schema_error(schema("scenario"), report) == "");
  for (const char *row : {"epsilon", "alpha1", "alpha2", "complexity", "bound"})
    CHECK(report["table"].contains(row));
  CHECK(canonical_dump(parse_config(report["config"])) == report["config"].dump());
  CHECK(report["certificates"].size() == 3);
}

TEST_CASE("simulate command") {
  const auto dir = scratch("simulate");
  std::ostringstream out, err;
  REQUIRE(cmd_exact(kRoot + "/configs/robot.json", (dir / "exact").string(), out, err) == kExitOk);
  const auto alpha = (dir / "exact" / "report.json").string();

  out.str("");
  SimulateOptions opt;
  opt.eps = 0.0686;
  CHECK(cmd_simulate(kRoot + "/configs/robot.json", alpha, opt, (dir / "a").string(), out, err) ==
        kExitOk);
  CHECK(out.str() == "passed 101/101\n");
  auto report = testing::read_json_file((dir / "a" / "report.json").string());
  CHECK(testing::schema_error(schema("simulate"), report) == "");

  out.str("");
  opt.eps = 0.0;
  CHECK(cmd_simulate(kRoot + "/configs/robot.json", alpha, opt, (dir / "b").string(), out, err) ==
        kExitOk);
  CHECK(out.str() == "passed 1/1\n");
  const auto csv = read_text(dir / "b" / "trajectories.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 7);

  opt.eps = 0.2;
  opt.vertex = true;
  CHECK(cmd_simulate(kRoot + "/configs/robot.json", alpha, opt, (dir / "c").string(), out, err) ==
        kExitOk);
  report = testing::read_json_file((dir / "c" / "report.json").string());
  CHECK(report["failed"].get<int>() >= 1);

  CHECK(cmd_simulate(kRoot + "/configs/robot.json", kRoot + "/configs/robot.json", opt,
                     (dir / "d").string(), out, err) == kExitUsage);
}

TEST_CASE("casestudy command") {
  const auto dir = scratch("casestudy");
  std::ostringstream out, err;
  CHECK(cmd_casestudy("robot", {}, dir.string(), out, err) == kExitOk);
  const auto report = testing::read_json_file((dir / "report.json").string());
  CHECK(testing::schema_error(schema("exact"), report) == "");
  CHECK(report["experiment"]["within_passed"] == 100);
  CHECK(report["experiment"]["exceeding_violates"] == true);
  CasestudyOptions opt;
  opt.scenarios = 20;
  CHECK(cmd_casestudy("acc", opt, (dir / "acc").string(), out, err) == kExitOk);
  CHECK(cmd_casestudy("plane", opt, (dir / "x").string(), out, err) == kExitUsage);
}
