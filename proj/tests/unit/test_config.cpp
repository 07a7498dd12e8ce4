#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "henonlab/config.hpp"
#include "henonlab/experiments.hpp"

using namespace henonlab;
namespace fs = std::filesystem;

namespace {

const char* kHeader = R"(schema: 1
prng_seed: 7
threads: 1
map:
  kind: generalized
  polynomial: [-6, 0, 1]
  shear: -1
)";

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "henonlab_unit" / "config";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("filtration radius of the horseshoe") {
  const std::vector<HenonFactor> factors{{Polynomial({-6.0, 0.0, 1.0}), -1.0}};
  CHECK(filtration_radius(factors) == doctest::Approx(fixtures::kHorseshoeRadius).epsilon(1e-12));
}

TEST_CASE("parsing resolves defaults and the map") {
  const ExperimentConfig c = parse_config(std::string(kHeader) + R"(experiments:
  - name: census
    type: periodic_census
    periods: {from: 1, to: 3}
  - name: tv
    type: transversality
    periods: [2, 4]
    epsilon: 0.05
    eta: 1.0e-3
)");
  CHECK(c.prng_seed == 7);
  REQUIRE(c.experiments.size() == 2);
  CHECK(std::get<CensusExperiment>(c.experiments[0].body).periods == std::vector<int>{1, 2, 3});
  CHECK(std::get<TransversalityExperiment>(c.experiments[1].body).epsilon == 0.05);
  CHECK(experiment_type(c.experiments[1].body) == "transversality");
  CHECK(c.tolerances.newton_tol == 1e-10);
  const HenonMap f = build_map(c.map);
  CHECK(f.main_degree() == 2);
  CHECK(f.domain().radius_M() == doctest::Approx(fixtures::kHorseshoeRadius));
  const std::string plan = resolved_plan(c);
  CHECK(plan.find("newton_tol") != std::string::npos);
  CHECK(plan.find("census") != std::string::npos);
  CHECK(plan.find("tv") != std::string::npos);
}

TEST_CASE("unknown key is rejected with its name and line") {
  const std::string text = std::string(kHeader) + R"(experiments:
  - name: census
    type: periodic_census
    period: [1, 2]
)";
  try {
    parse_config(text);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'period'") != std::string::npos);
    CHECK(msg.find("line 11") != std::string::npos);
  }
  const fs::path p = write_config("bad.yaml", text);
  std::ostringstream out, err;
  CHECK(run_config_file(p, {}, out, err) == kExitConfig);
  CHECK(err.str().find("period") != std::string::npos);
  CHECK(describe_config_file(p, {}, out, err) == kExitConfig);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_config("schema: 2\nmap: {kind: generalized, polynomial: [-6, 0, 1], shear: -1}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("schema: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kHeader) + "experiments:\n  - name: x\n    type: nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kHeader) + "experiments:\n  - type: green\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("schema: 1\nmap: [1, 2\n"), ConfigError);
}

TEST_CASE("empty experiment list runs to an empty summary") {
  const fs::path out_dir = fs::temp_directory_path() / "henonlab_unit" / "empty_run";
  fs::remove_all(out_dir);
  const fs::path p = write_config("empty.yaml", std::string(kHeader) + "output: " + out_dir.string() + "\nexperiments: []\n");
  std::ostringstream out, err;
  CHECK(run_config_file(p, {}, out, err) == kExitOk);
  const auto summary = nlohmann::json::parse(slurp(out_dir / "summary.json"));
  CHECK(summary["schema"] == 1);
  CHECK(summary["experiments"].empty());
  CHECK(summary.contains("map"));
}

TEST_CASE("describe and run share the resolved plan") {
  const fs::path out_dir = fs::temp_directory_path() / "henonlab_unit" / "plan_run";
  fs::remove_all(out_dir);
  const fs::path p = write_config("plan.yaml", std::string(kHeader) + R"(experiments:
  - name: census
    type: periodic_census
    periods: {from: 1, to: 3}
)");
  RunOverrides overrides;
  overrides.output = out_dir.string();
  std::ostringstream described, err, ran;
  REQUIRE(describe_config_file(p, overrides, described, err) == kExitOk);
  REQUIRE(run_config_file(p, overrides, ran, err) == kExitOk);
  const std::string plan = slurp(out_dir / "plan.txt");
  CHECK(described.str().find(plan) != std::string::npos);
  CHECK(described.str().find(fmt::format("plan hash {:016x}", fnv1a(plan))) != std::string::npos);
  for (int n = 1; n <= 3; ++n) CHECK(fs::exists(out_dir / "census" / fmt::format("census_n{}.csv", n)));

  const auto summary = nlohmann::json::parse(slurp(out_dir / "summary.json"));
  REQUIRE(summary["experiments"].size() == 1);
  const auto& e = summary["experiments"][0];
  CHECK(e["name"] == "census");
  CHECK(e["status"] == "completed");
  for (const auto& v : e["verdicts"]) {
    CHECK(v.contains("check"));
    CHECK(v.contains("pass"));
    CHECK(v.contains("value"));
    CHECK(v.contains("tolerance"));
    CHECK(v["pass"] == true);
  }
}

TEST_CASE("output overrides and unwritable output") {
  const fs::path blocker = write_config("blocker", "x");
  const fs::path p = write_config("io.yaml", std::string(kHeader) + "experiments: []\n");
  RunOverrides overrides;
  overrides.output = (blocker / "sub").string();
  std::ostringstream out, err;
  CHECK(run_config_file(p, overrides, out, err) == kExitIo);
  CHECK(run_config_file(blocker.parent_path() / "does_not_exist.yaml", {}, out, err) != kExitOk);
}
