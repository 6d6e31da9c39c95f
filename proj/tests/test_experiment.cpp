#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppthin/experiment.hpp"

using namespace ppthin;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing, canonicalization, and hashing") {
  const std::string text = R"({
    "kind": "matern_poisson",
    "seed": 17,
    "replicates": 12000,
    "window": {"bounds": [[0, 1], [0, 1]]},
    "norm": "euclidean",
    "params": {"m1": 0.5, "r": [0.05, 0.1]}
  })";
  const ExperimentConfig config = parse_config(text);
  CHECK(config.seed == 17);
  CHECK(config.params.at("r").is_sweep());
  CHECK(config.param("m1", 3) == 0.5);
  const std::uint64_t h = config_hash(config);
  CHECK(h == config_hash(parse_config(text)));
  ExperimentConfig other = config;
  other.seed = 18;
  CHECK(config_hash(other) != h);
  CHECK(validate_config(config).empty());
}

TEST_CASE("validation reports each violated precondition with its path") {
  ExperimentConfig config = parse_config(R"({
    "kind": "boolean_cover",
    "params": {"m1": -2.0, "l1": 3.0, "R": 0.1, "rbar": 0.15}
  })");
  const std::vector<std::string> errors = validate_config(config);
  REQUIRE_FALSE(errors.empty());
  bool saw_m1 = false, saw_rbar = false;
  for (const std::string& e : errors) {
    if (e.find("params.m1") != std::string::npos) saw_m1 = true;
    if (e.find("params.rbar") != std::string::npos) saw_rbar = true;
  }
  CHECK(saw_m1);
  CHECK(saw_rbar);
  ExperimentConfig missing = parse_config(R"({"kind": "matern_poisson", "params": {}})");
  const std::vector<std::string> missing_errors = validate_config(missing);
  CHECK(missing_errors.size() >= 2);  // m1 and r both required
  ExperimentConfig qn = parse_config(R"({
    "kind": "boolean_rate_sweep",
    "params": {"l1": 1.0, "m1": 1.0, "n": [10.0], "q_n": 0.001}
  })");
  bool saw_qn = false;
  for (const std::string& e : validate_config(qn))
    if (e.find("params.q_n") != std::string::npos) saw_qn = true;
  CHECK(saw_qn);
}

TEST_CASE("rate sweep experiment emits bounds without sampling") {
  const ExperimentConfig config = parse_config(R"({
    "kind": "boolean_rate_sweep",
    "seed": 3,
    "params": {"l1": 1.0, "m1": 1.0, "n": [100.0, 1000.0, 10000.0]}
  })");
  const auto dir = fresh_dir("ppthin_rate_sweep");
  const ExperimentResult result = run_experiment(config, dir.string());
  CHECK(result.all_pass);
  CHECK(result.points.size() == 3);
  const std::string sweep = slurp(dir / "sweep.csv");
  CHECK(sweep.find("total_tv") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "point_0_bound.json"));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
}

TEST_CASE("experiment outputs are byte-identical across reruns") {
  const std::string text = R"({
    "kind": "matern_poisson",
    "seed": 5,
    "replicates": 12000,
    "window": {"bounds": [[0, 1], [0, 1]]},
    "params": {"m1": 0.4, "r": 0.1}
  })";
  const ExperimentConfig config = parse_config(text);
  const auto dir_a = fresh_dir("ppthin_rerun_a");
  const auto dir_b = fresh_dir("ppthin_rerun_b");
  const ExperimentResult ra = run_experiment(config, dir_a.string());
  const ExperimentResult rb = run_experiment(config, dir_b.string());
  CHECK(ra.hash == rb.hash);
  for (const char* name : {"sweep.csv", "distances.csv", "checks.csv", "manifest.json"})
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  CHECK(slurp(dir_a / "point_0_bound.json") == slurp(dir_b / "point_0_bound.json"));
  CHECK(slurp(dir_a / "point_0_certificate.json") ==
        slurp(dir_b / "point_0_certificate.json"));
  CHECK(ra.all_pass);
}

TEST_CASE("identity suite runs green at moderate replicates") {
  const ExperimentConfig config = parse_config(R"({
    "kind": "identity_suite",
    "seed": 9,
    "replicates": 8000,
    "params": {"intensity": 2.0, "ball_radius": 0.15, "p": 0.6, "r": 0.1}
  })");
  const auto dir = fresh_dir("ppthin_identity");
  const ExperimentResult result = run_experiment(config, dir.string());
  CHECK(result.all_pass);
  const std::string checks = slurp(dir / "checks.csv");
  for (const char* name :
       {"exchange_unit", "exchange_total_count", "exchange_empty_ball",
        "moment_first_constant", "moment_second_matern", "density_normalization",
        "thinned_density_singleton"})
    CHECK(checks.find(name) != std::string::npos);
}

TEST_CASE("a failing point is isolated and the manifest is still written") {
  // Too few replicates for the count certificate: the point errors out, the
  // manifest records it, and the run reports failure without throwing.
  const ExperimentConfig config = parse_config(R"({
    "kind": "matern_poisson",
    "seed": 4,
    "replicates": 500,
    "params": {"m1": 0.4, "r": [0.05, 0.1]}
  })");
  const auto dir = fresh_dir("ppthin_partial");
  const ExperimentResult result = run_experiment(config, dir.string());
  CHECK_FALSE(result.all_pass);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("errors") != std::string::npos);
  CHECK(manifest.find("too few samples") != std::string::npos);
}

TEST_CASE("invalid configs are rejected before any work happens") {
  const ExperimentConfig config = parse_config(R"({
    "kind": "matern_poisson",
    "params": {"m1": -1.0, "r": 0.1}
  })");
  CHECK_THROWS_AS(run_experiment(config, "/tmp/ppthin_invalid"), std::invalid_argument);
}
