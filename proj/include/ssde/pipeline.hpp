#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssde/config.hpp"
#include "ssde/decomposition.hpp"
#include "ssde/density.hpp"
#include "ssde/simulation.hpp"
#include "ssde/transform.hpp"
#include "ssde/zvonkin.hpp"

namespace ssde {

using Json = nlohmann::json;

enum ExitCode : int { kExitPass = 0, kExitCertificate = 2, kExitConfig = 3, kExitRuntime = 4 };

/// One named certificate or diagnostic. Gating entries decide the exit code.
struct Check {
  std::string name;
  bool gating = true;
  bool passed = false;
  Json values;
};

/// CSV table for plotting, written next to the certificate.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct StageReport {
  std::string stage;
  std::vector<Check> checks;
  std::map<std::string, Table> tables;
  bool passed() const;
  Json to_json() const;
};

/// Everything one mollification level produced.
struct LevelRun {
  int level = 0;
  double delta = 0.0;
  CoefficientSet coeffs;
  PathEnsemble ensemble;
};

/// Runs the stages of one experiment, caching intermediate results so that a
/// later stage reuses what an earlier one computed. Stage errors are rethrown
/// with the stage name prefixed.
class Pipeline {
 public:
  explicit Pipeline(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  double epsilon() const;
  double holder_exponent() const { return epsilon() / (1.0 + epsilon()); }

  const CoefficientSet& coefficients();
  const InitialLaw& initial_law();
  const ZvonkinSolution* zvonkin_solution();  // null when calibration failed
  const std::vector<LevelRun>& levels();

  StageReport run_decomposition();
  StageReport run_zvonkin();  // calibration, transform properties, transformed coefficients
  StageReport run_simulation();
  StageReport run_density();

  /// Writes <output_dir>/<stage>.json plus the stage's CSV tables.
  void write(const StageReport& report) const;
  /// Timestamps and environment, kept apart so the certificates are reproducible.
  void write_metadata(const std::vector<std::string>& stages) const;

 private:
  ExperimentConfig config_;
  std::optional<CoefficientSet> coeffs_;
  std::optional<InitialLaw> law_;
  bool zvonkin_done_ = false;
  std::optional<ZvonkinSolution> sol_;
  std::optional<CalibrationError> calibration_error_;
  std::optional<std::vector<LevelRun>> levels_;
};

struct PipelineResult {
  std::vector<StageReport> stages;
  int exit_code = kExitPass;
};

/// All stages in order; writes every certificate and a summary. A failed
/// calibration stops the run after the zvonkin stage.
PipelineResult run_pipeline(const ExperimentConfig& config);

}  // namespace ssde
