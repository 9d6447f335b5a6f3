#pragma once

#include "grpheat/core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace grpheat {

enum class Experiment { solve_classical, solve_weak, solve_regularized, spectral, sweep, regularity, maxprinciple };

enum class FieldFormat { csv, binary };

std::string to_string(Experiment e);
std::string to_string(FieldFormat f);

/// PASS/FAIL gates of the embedded checks. Defaults follow the acceptance suite.
struct Thresholds {
  Scalar oracle = 1e-3;       ///< max-norm error against a closed form (tol_oracle)
  Scalar transform = 5e-3;    ///< classical route on constant W != 0 (tol_transform)
  Scalar rate_min = 0.35;
  Scalar rate_max = 0.65;
  Scalar rate_r2 = 0.95;
  Scalar reduced_min = 0.1;
  Scalar reduced_max = 0.4;
  Scalar space_min = 1.3;
  Scalar space_max = 1.7;
  Scalar time_min = 0.55;
  Scalar time_max = 0.95;
  Scalar lambda = 1e-3;       ///< relative, lambda_k against k^2 for constant W
  Scalar sweep_noise = 0.05;  ///< allowed relative increase between successive sweep errors
};

struct RunConfig {
  Experiment experiment = Experiment::solve_classical;
  std::string potential = "const:0";
  std::string initial = "sin:1";
  int n = 512;
  int m = 1024;
  Scalar T = 1;
  int K = 64;
  std::vector<Scalar> eps_list;
  std::optional<Scalar> epsilon;  ///< solve_regularized only
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "grp-heat-out";
  FieldFormat format = FieldFormat::csv;
  Scalar gamma = 0.25;
  std::optional<Scalar> floor_t;  ///< regularity window; default T/4, or 0 for compensated data
  bool dump_modes = false;
  int threads = 0;
  Thresholds thresholds;
};

/// Parses a flat `key = value` document; `#` starts a comment. Relative file paths in the
/// potential and initial specs are resolved against `base_dir`. Validates every value and
/// the length of a file potential against n.
RunConfig parse_config(const std::string& source, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

/// Replaces the seed of the config and of an fbm potential spec.
void override_seed(RunConfig& config, std::uint64_t seed);

/// Every key with its resolved value, in a fixed order, defaults included.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

/// `key = value` lines of config_entries; parse_config reads it back unchanged.
std::string render_config(const RunConfig& config);

}  // namespace grpheat
