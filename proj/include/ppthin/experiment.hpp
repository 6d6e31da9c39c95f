#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppthin/geometry.hpp"

namespace ppthin {

enum class ExperimentKind {
  matern_poisson,     // hard-core thinning of a Poisson parent, bound + certificate
  boolean_cover,      // Boolean-model cover thinning of a Poisson parent
  boolean_rate_sweep, // contracted-bound evaluation over a grid of levels n
  strauss_matern,     // hard-core thinning of a pairwise-interaction parent
  identity_suite      // exchange-formula / moment / density identity checks
};

/// One parameter value: a scalar or a sweep grid.
struct ParamSpec {
  std::vector<double> values;  // size 1 = scalar
  bool is_sweep() const { return values.size() > 1; }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::matern_poisson;
  std::uint64_t seed = 1;
  std::size_t replicates = 100000;
  Window window = Window::unit_cube(2);
  Norm norm = Norm::euclidean;
  std::map<std::string, ParamSpec> params;

  double param(const std::string& name, std::size_t index) const;
  bool has(const std::string& name) const { return params.count(name) > 0; }
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string canonical_config_json(const ExperimentConfig& config);
/// FNV-1a over the canonical serialization; identifies a run together with
/// the seed (which is part of the canonical form).
std::uint64_t config_hash(const ExperimentConfig& config);

/// Structural and precondition validation; returns one message per
/// violation, each citing the config path.
std::vector<std::string> validate_config(const ExperimentConfig& config);

struct SweepPointResult {
  std::size_t index = 0;
  std::map<std::string, double> point;   // parameter values at this point
  std::string bound_json;                // empty when the point has no bound
  std::string certificate_json;
  std::vector<std::string> distance_rows;  // metric,estimate,se,direction rows
  std::vector<std::string> check_rows;     // identity-check rows
  bool pass = true;
  std::string error;                     // nonempty when the point failed
};

struct ExperimentResult {
  std::uint64_t hash = 0;
  std::vector<SweepPointResult> points;
  bool all_pass = true;
  std::string manifest_path;
};

/// Runs every sweep point (concurrently when PPTHIN_THREADS > 1), writes the
/// manifest, per-point bound and certificate JSON, and tidy CSV tables into
/// out_dir. The manifest is written even when points fail.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace ppthin
