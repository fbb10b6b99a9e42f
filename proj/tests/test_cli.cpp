#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riskctl/cli.hpp"
#include "riskctl/error.hpp"

using namespace riskctl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("riskctl_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const cli::RunConfig c = cli::parse_config_json(
      R"({"command": "tradeoff", "system": "thermostat", "solver": "cvar", "alpha": [0.5, 0.05], "x0": [[20.0]], "n": 10, "seed": 4})");
  CHECK(c.command == "tradeoff");
  CHECK(c.solver == "cvar");
  CHECK(c.alphas == std::vector<double>{0.5, 0.05});
  CHECK(c.n == 10);
  CHECK(c.seed == 4);
  REQUIRE(c.x0.size() == 1);
  CHECK(c.x0[0] == State{20.0});
  CHECK_NOTHROW(cli::validate(c));

  const cli::RunConfig round = cli::parse_config_json(cli::config_to_json(c));
  CHECK(round.alphas == c.alphas);
  CHECK(round.seed == c.seed);

  CHECK_THROWS_AS(cli::parse_config_json(R"({"bogus": 1})"), InputError);
  CHECK_THROWS_AS(cli::parse_config_json("{"), InputError);
  cli::RunConfig bad = c;
  bad.alphas = {1.5};
  CHECK_THROWS_AS(cli::validate(bad), ParameterError);
  bad = c;
  bad.solver = "eu";
  bad.thetas = {0.5};
  CHECK_THROWS_AS(cli::validate(bad), ParameterError);
  bad = c;
  bad.alphas.clear();
  CHECK_THROWS(cli::validate(bad));
  bad = c;
  bad.n = 0;
  CHECK_THROWS(cli::validate(bad));
  CHECK(cli::parse_state("2,2.5") == State{2.0, 2.5});
}

TEST_CASE("solve writes values and policy with fixed headers") {
  cli::RunConfig c;
  c.command = "solve";
  c.solver = "eu";
  c.thetas = {-5e-5};
  c.out = scratch("solve").string();
  std::ostringstream err;
  REQUIRE(cli::run(c, err) == cli::ExitCode::kOk);
  const fs::path out(c.out);
  CHECK(first_line(out / "values_-5e-05.csv") == "x1,value");
  CHECK(first_line(out / "policy_-5e-05.csv") == "t,x1,control_index,control");
  CHECK(fs::exists(out / "manifest.json"));

  c.solver = "cvar";
  c.thetas.clear();
  c.alphas = {0.5};
  c.s_resolution = 10;
  REQUIRE(cli::run(c, err) == cli::ExitCode::kOk);
  CHECK(first_line(out / "values_0.5.csv") == "x1,value,budget");
  CHECK(first_line(out / "policy_0.5.csv") == "t,x1,s,control_index,control");
}

TEST_CASE("tradeoff is byte-identical across runs and worker counts") {
  cli::RunConfig c;
  c.command = "tradeoff";
  c.solver = "cvar";
  c.alphas = {0.999, 0.5, 0.05, 0.005};
  c.s_resolution = 16;
  c.n = 2000;
  c.seed = 3;
  std::ostringstream err;
  std::string first;
  for (std::size_t jobs : {1u, 8u, 1u}) {
    c.jobs = jobs;
    c.out = scratch("tradeoff_" + std::to_string(jobs)).string();
    REQUIRE(cli::run(c, err) == cli::ExitCode::kOk);
    const std::string text = slurp(fs::path(c.out) / "tradeoff.csv");
    if (first.empty()) first = text;
    CHECK(text == first);
  }
  CHECK(first.rfind("x0,parameter,alpha,mean,variance,var,exceedance,cvar\n", 0) == 0);
  // One row per alpha for each of the five default initial conditions.
  CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 4 * 5);
}

TEST_CASE("exit codes") {
  std::ostringstream err;
  cli::RunConfig c;
  c.thetas = {1.0};
  c.out = scratch("codes").string();
  CHECK(cli::run(c, err) == cli::ExitCode::kValidation);
  CHECK(err.str().find("theta") != std::string::npos);

  c.solver = "cvar";
  c.thetas.clear();
  c.alphas = {0.5};
  c.memory_budget = 1000;
  err.str("");
  CHECK(cli::run(c, err) == cli::ExitCode::kMemory);
  CHECK(err.str().find("required_bytes=") != std::string::npos);
}

TEST_CASE("pedagogical and safe-set outputs") {
  std::ostringstream err;
  cli::RunConfig p;
  p.command = "pedagogical";
  p.out = scratch("ped").string();
  REQUIRE(cli::run(p, err) == cli::ExitCode::kOk);
  CHECK(first_line(fs::path(p.out) / "pedagogical.csv") == "u,mean,variance,ce_0,ce_1,ce_5,cvar_1,cvar_0.5,cvar_0.05,cvar_0.005");

  cli::RunConfig s;
  s.command = "safe-sets";
  s.solver = "eu";
  s.thetas = {-1.0};
  s.r = {0.0, 2.0};
  s.out = scratch("safe").string();
  REQUIRE(cli::run(s, err) == cli::ExitCode::kOk);
  CHECK(first_line(fs::path(s.out) / "safesets_-1_2.csv") == "x1,value,member");
}

TEST_CASE("published schema lists exactly the configuration fields") {
  std::ifstream f(fs::path(RISKCTL_SOURCE_DIR) / "docs" / "config.schema.json");
  REQUIRE(f.good());
  const nlohmann::json schema = nlohmann::json::parse(f);
  cli::RunConfig c;
  c.thetas = {-1.0};
  c.x0 = {State{20.0}};
  const nlohmann::json doc = nlohmann::json::parse(cli::config_to_json(c));
  std::vector<std::string> a, b;
  for (const auto& [k, v] : schema["properties"].items()) a.push_back(k);
  for (const auto& [k, v] : doc.items()) b.push_back(k);
  CHECK(a == b);
}
