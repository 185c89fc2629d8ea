#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssde/coefficients.hpp"
#include "ssde/simulation.hpp"

namespace ssde {

enum class SplitMode { Direct, Exponents };

/// Everything an experiment needs. Files are key = value lines; '#' starts a
/// comment. Keys (all optional, defaults from `preset` when given):
///
///   preset             brownian | ou | powerlaw-singular | negative-control
///   dim, half_width, points_per_axis, time_horizon, time_steps
///   split              direct (b1_file, b2_file) | exponents (drift_file, exponent_p, exponent_q)
///   exponent_p, exponent_q   reals, "inf" allowed
///   uniformly_local    true | false
///   b1_file, b2_file, sigma_file, drift_file   field files (.csv or binary)
///   ellipticity_K, modulus
///   initial_law        point | gaussian | uniform | empirical
///   initial_center     comma-separated coordinates
///   initial_scale, initial_file
///   levels             "n0..n1"
///   mollifier_delta0, n_paths, dt, report_every, seed
///   lambda0, force_lambda, transform_pairs
///   bins, density_exponents   "p:q,p:q,..."
///   output_dir
struct ExperimentConfig {
  std::string preset;
  int dim = 1;
  double half_width = 8.0;
  int points_per_axis = 129;
  double time_horizon = 1.0;
  int time_steps = 11;

  SplitMode split = SplitMode::Direct;
  double exponent_p = 0.0;
  double exponent_q = 0.0;
  bool uniformly_local = false;
  std::string b1_file, b2_file, sigma_file, drift_file;
  double ellipticity_K = 1.0;
  std::string modulus;

  InitialLaw::Kind initial_law = InitialLaw::Kind::Point;
  std::vector<double> initial_center;
  double initial_scale = 0.0;
  std::string initial_file;

  int level_min = 0;
  int level_max = 0;
  double mollifier_delta0 = 1.0;
  Index n_paths = 10000;
  double dt = 1e-3;
  int report_every = 10;
  std::uint64_t seed = 1;

  double lambda0 = 1.0;
  std::optional<double> force_lambda;
  Index transform_pairs = 10000;

  int bins = 32;
  std::vector<std::pair<double, double>> density_exponents;
  std::filesystem::path output_dir = "ssde-out";

  Grid grid() const;
  SimulationOptions simulation() const;
};

/// Parses key = value text. Unknown keys and malformed values throw
/// ErrorKind::Config naming the line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one key = value pair on top of an existing config (used by the
/// parser and by command-line overrides).
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
/// Names of all accepted keys.
std::vector<std::string> config_keys();

struct ConfigIssue {
  std::string code;  // stable identifier, e.g. "exponents.weaker"
  std::string message;
};

/// Runs every admissibility check and reports all failures.
std::vector<ConfigIssue> validate(const ExperimentConfig& config);

/// Coefficients described by the config: preset formulas or field files; with
/// split = exponents the drift is divided by the decomposition.
CoefficientSet build_coefficients(const ExperimentConfig& config);
InitialLaw build_initial_law(const ExperimentConfig& config);

/// Preset configurations.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();
/// Preset coefficient formulas on a given grid.
CoefficientSet preset_coefficients(const std::string& name, const Grid& grid);

}  // namespace ssde
