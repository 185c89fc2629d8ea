#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssde/pipeline.hpp"

using namespace ssde;

namespace {

struct Options {
  std::string preset;
  std::string config_file;
  std::vector<std::string> settings;
  long long n_paths = 0;
  double dt = 0.0;
  long long seed = -1;
  std::string levels;
  double box = 0.0;
  std::string output_dir;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--preset", o.preset, "Preset name (brownian, ou, powerlaw-singular, negative-control)");
  app->add_option("--config,--coeffs", o.config_file, "Configuration file (key = value lines)");
  app->add_option("--set", o.settings, "Extra key=value setting, may repeat");
  app->add_option("--n-paths", o.n_paths, "Number of Monte Carlo paths");
  app->add_option("--dt", o.dt, "Euler step");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--levels", o.levels, "Mollification levels n0..n1");
  app->add_option("--box", o.box, "Half width L of the box [-L, L]^d");
  app->add_option("--out", o.output_dir, "Output directory");
}

ExperimentConfig assemble(const Options& o) {
  require(o.config_file.empty() || o.preset.empty(), ErrorKind::Config,
          "give either --preset or --config, not both");
  ExperimentConfig c;
  if (!o.config_file.empty()) c = load_config(o.config_file);
  else if (!o.preset.empty()) c = preset_config(o.preset);
  else fail(ErrorKind::Config, "give --preset or --config");
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    require(eq != std::string::npos, ErrorKind::Config, "--set expects key=value, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.n_paths > 0) c.n_paths = o.n_paths;
  if (o.dt > 0.0) c.dt = o.dt;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.levels.empty()) apply_setting(c, "levels", o.levels);
  if (o.box > 0.0) c.half_width = o.box;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  return c;
}

ExperimentConfig validated(const Options& o) {
  ExperimentConfig c = assemble(o);
  const auto issues = validate(c);
  if (!issues.empty()) {
    std::string msg = "configuration rejected:";
    for (const auto& i : issues) msg += "\n  [" + i.code + "] " + i.message;
    fail(ErrorKind::Config, msg);
  }
  return c;
}

void print(const StageReport& r) {
  std::cout << r.stage << ": " << (r.passed() ? "pass" : "FAIL") << '\n';
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.passed ? "ok  " : (c.gating ? "FAIL" : "warn")) << ' ' << c.name
              << (c.gating ? "" : " (diagnostic)") << '\n';
  }
}

int run_stage(const Options& o, StageReport (Pipeline::*stage)()) {
  Pipeline p(validated(o));
  const StageReport r = (p.*stage)();
  p.write(r);
  p.write_metadata({r.stage});
  print(r);
  return r.passed() ? kExitPass : kExitCertificate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for SDEs with singular drift"};
  app.require_subcommand(1);
  Options o;

  auto* decompose = app.add_subcommand("decompose", "Split the drift and certify the split bounds");
  auto* zvonkin = app.add_subcommand("zvonkin", "Calibrate lambda, solve the backward PDE, check the transform");
  auto* simulate = app.add_subcommand("simulate", "Euler-Maruyama over the mollification levels");
  auto* density = app.add_subcommand("density", "Empirical densities, Fokker-Planck residual, duality bounds");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all certificates");
  auto* check = app.add_subcommand("validate", "Check a configuration without running it");
  for (auto* sub : {decompose, zvonkin, simulate, density, pipeline, check}) add_common(sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (check->parsed()) {
      const ExperimentConfig c = assemble(o);
      const auto issues = validate(c);
      for (const auto& i : issues) std::cout << "[" << i.code << "] " << i.message << '\n';
      if (issues.empty()) std::cout << "configuration valid\n";
      return issues.empty() ? kExitPass : kExitConfig;
    }
    if (decompose->parsed()) return run_stage(o, &Pipeline::run_decomposition);
    if (zvonkin->parsed()) return run_stage(o, &Pipeline::run_zvonkin);
    if (simulate->parsed()) return run_stage(o, &Pipeline::run_simulation);
    if (density->parsed()) return run_stage(o, &Pipeline::run_density);
    const PipelineResult result = run_pipeline(validated(o));
    for (const auto& s : result.stages) print(s);
    std::cout << (result.exit_code == kExitPass ? "all certificates passed" : "certificate failure") << '\n';
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::Config ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
