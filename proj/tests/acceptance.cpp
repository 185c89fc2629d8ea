// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "manufactured.hpp"
#include "oracles.hpp"
#include "ssde/decomposition.hpp"
#include "ssde/diagnostics.hpp"
#include "ssde/error.hpp"
#include "ssde/pipeline.hpp"

using namespace ssde;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

const Check& check_named(const StageReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  fail(ErrorKind::Parameter, "no check named " + name);
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("ssde_acceptance_" + name); }

Outcome decomposition_exactness() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::lognormal_distribution<double> mag(0.0, 2.0);
  std::normal_distribution<double> dir(0.0, 1.0);
  int fields = 0, bad = 0, with_gt = 0;
  double worst_gt = 0.0, worst_le_ratio = 0.0;
  while (fields < 200) {
    const int d = 1 + fields % 2;
    const double p = 3.0 + 5.0 * u(rng);
    const double q = 2.0 + 6.0 * u(rng);
    if (1.0 / q + d / p >= 1.0) continue;
    const Grid g(d, 2.0, d == 1 ? 65 : 25, 1.0, 9);
    const int codim = 1 + static_cast<int>(u(rng) * d);
    RowMatrix v(g.time_steps() * g.node_count(), codim);
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = mag(rng) * dir(rng);
    // Peak between 1e-2 and 1e1 so that both parts are usually nonempty.
    v *= std::pow(10.0, -2.0 + 3.0 * u(rng)) / v.cwiseAbs().maxCoeff();
    const SpaceTimeField f(g, codim, std::move(v));
    const DecompositionResult r = decompose(f, p, q);
    const bool exact = combine(1.0, r.f_le, 1.0, r.f_gt).values() == f.values();
    worst_gt = std::max(worst_gt, r.certified_gt_norm);
    if (r.le_bound > 0.0) worst_le_ratio = std::max(worst_le_ratio, r.certified_le_norm / r.le_bound);
    const bool ok = exact && r.certified_gt_norm <= 1.0 + 1e-6 &&
                    r.certified_le_norm <= r.le_bound * (1.0 + 1e-9) + 1e-12;
    if (!ok) ++bad;
    if (r.f_gt.values().cwiseAbs().maxCoeff() > 0.0) ++with_gt;
    ++fields;
  }
  return {bad == 0 && with_gt >= fields / 2,
          fmt("%d fields (%d with nonempty f^>), %d failures, max gt norm %.6f, max le/bound %.6f", fields, with_gt,
              bad, worst_gt, worst_le_ratio)};
}

Outcome epsilon_identity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  double worst = 0.0;
  while (tested < 10000) {
    const int d = 1 + static_cast<int>(u(rng) * 3.0);
    const double p = d + 20.0 * u(rng);
    const double q = 1.0 + 20.0 * u(rng);
    if (1.0 / q + d / p >= 1.0) continue;
    const double eps = critical_epsilon(p, q, d);
    worst = std::max(worst, std::abs(oracle::interpolation_identity(eps, p, q, d) - 1.0));
    ++tested;
  }
  return {worst <= 1e-12, fmt("%d triples, max |(1+eps)/q + (d+eps)/p - 1| = %.3e", tested, worst)};
}

Outcome pde_order() {
  std::vector<double> errors;
  for (int m : {33, 65, 129}) {
    const Grid g(2, 1.0, m, 1.0, 17);
    const auto prob = manufactured::build(g, 1.0);
    const ZvonkinSolution s = solve_backward_pde(prob.a, prob.g, prob.f, 1.0);
    errors.push_back((s.u.values() - prob.exact.values()).cwiseAbs().maxCoeff());
  }
  const double o1 = std::log2(errors[0] / errors[1]);
  const double o2 = std::log2(errors[1] / errors[2]);
  return {o1 >= 1.0 && o2 >= 1.0 && errors[2] <= 5e-3,
          fmt("errors %.3e %.3e %.3e, observed orders %.2f %.2f", errors[0], errors[1], errors[2], o1, o2)};
}

Outcome transform_properties(Pipeline& powerlaw) {
  const ZvonkinSolution* sol = powerlaw.zvonkin_solution();
  if (!sol) return {false, "calibration failed"};
  const TransformPropertyReport r = verify_transform_properties(*sol, 10000);
  const bool ok = r.passed && r.phi_min_ratio >= 0.48 && r.phi_max_ratio <= 2.02 && r.inverse_min_ratio >= 0.48 &&
                  r.inverse_max_ratio <= 2.02 && r.max_roundtrip_error <= 1e-9;
  return {ok, fmt("lambda %.3g, Phi ratios [%.3f, %.3f], inverse ratios [%.3f, %.3f], round trip %.2e",
                  sol->lambda_bar, r.phi_min_ratio, r.phi_max_ratio, r.inverse_min_ratio, r.inverse_max_ratio,
                  r.max_roundtrip_error)};
}

Outcome identity_degeneracy() {
  const ExperimentConfig c = preset_config("powerlaw-singular");
  CoefficientSet coeffs = build_coefficients(c);
  coeffs.b2 = SpaceTimeField(coeffs.grid(), coeffs.dim());
  const ZvonkinSolution sol = calibrate_lambda(diffusion_tensor(coeffs.sigma), coeffs.b2, c.lambda0);
  const TransformedCoefficients t = transformed_coefficients(coeffs, sol, critical_epsilon(c.exponent_p, c.exponent_q, c.dim));
  const double db = (t.b_tilde.values() - coeffs.b1.values()).cwiseAbs().maxCoeff();
  const double ds = (t.sigma_tilde.values() - coeffs.sigma.values()).cwiseAbs().maxCoeff();
  return {db <= 1e-12 && ds <= 1e-12 && t.excluded_nodes == 0,
          fmt("max |b~ - b1| = %.2e, max |s~ - s| = %.2e over %lld nodes", db, ds,
              static_cast<long long>(t.b_tilde.values().rows()))};
}

Outcome monte_carlo_sanity() {
  ExperimentConfig c = preset_config("brownian");
  c.n_paths = 10000;
  c.dt = 1e-3;
  const PathEnsemble ens = euler_maruyama(build_coefficients(c), build_initial_law(c), c.simulation());
  const std::vector<double> x = marginal_samples(ens, ens.n_times() - 1, 0);
  const MarginalStats s = marginal_stats(x);
  const KsResult ks = ks_test(x, normal_cdf);
  const bool ok = static_cast<Index>(x.size()) == ens.n_paths() && std::abs(s.mean) <= 3.0 * s.mean_se &&
                  std::abs(s.variance - 1.0) <= 3.0 * s.variance_se && ks.p_value >= 0.01;
  return {ok, fmt("mean %.4f (se %.4f), variance %.4f (se %.4f), KS D %.4f p %.3f", s.mean, s.mean_se, s.variance,
                  s.variance_se, ks.statistic, ks.p_value)};
}

// Levels n >= 3 of the powerlaw run.
std::vector<const LevelRun*> upper_levels(Pipeline& p) {
  std::vector<const LevelRun*> out;
  for (const auto& run : p.levels())
    if (run.level >= 3 && run.level <= 6) out.push_back(&run);
  return out;
}

Outcome moment_bound(Pipeline& powerlaw, const StageReport& simulate) {
  const Json& moments = check_named(simulate, "simulation.holder_moments").values;
  const Json& bound = check_named(simulate, "simulation.path_bound").values;
  std::vector<double> means;
  double worst_fraction = 1.0;
  bool finite = true;
  for (const LevelRun* run : upper_levels(powerlaw)) {
    const std::string key = "level_" + std::to_string(run->level);
    const double m = moments[key]["mean"].get<double>();
    finite = finite && std::isfinite(m);
    means.push_back(m);
    worst_fraction = std::min(worst_fraction, bound[key]["fraction_under_bound"].get<double>());
  }
  if (means.size() != 4) return {false, "levels 3..6 were not simulated"};
  const double s = spread(means);
  return {finite && s < 0.10 && worst_fraction >= 0.99,
          fmt("moments %.3f %.3f %.3f %.3f, spread %.2f%%, min fraction under bound %.4f", means[0], means[1],
              means[2], means[3], 100.0 * s, worst_fraction)};
}

Outcome density_bound(Pipeline& powerlaw) {
  const ExperimentConfig& c = powerlaw.config();
  std::vector<EmpiricalDensity> dens;
  for (const LevelRun* run : upper_levels(powerlaw)) dens.push_back(empirical_density(run->ensemble, c.half_width, c.bins));
  if (dens.size() != 4) return {false, "levels 3..6 were not simulated"};
  std::vector<const EmpiricalDensity*> ptrs;
  for (const auto& d : dens) ptrs.push_back(&d);
  const auto table = density_uniformity(ptrs, c.density_exponents, powerlaw.initial_law().first_moment(powerlaw.coefficients().grid()));
  bool ok = table.size() == 3;
  std::string detail;
  for (const auto& u : table) {
    ok = ok && u.spread < 0.15 && u.bounded;
    detail += fmt("(%.1f,%.1f): sup %.4f spread %.2f%% ceiling %.4f; ", u.p_tilde, u.q_tilde, u.sup, 100.0 * u.spread,
                  u.ceiling);
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome fokker_planck() {
  ExperimentConfig c = preset_config("brownian");
  c.dt = 1e-3;
  c.bins = 64;
  const CoefficientSet coeffs = build_coefficients(c);
  const InitialLaw mu0 = build_initial_law(c);
  const auto bank = fixed_test_bank(1);
  std::vector<ResidualTable> tables;
  for (Index n : {10000, 40000}) {
    c.n_paths = n;
    const PathEnsemble ens = euler_maruyama(coeffs, mu0, c.simulation());
    tables.push_back(fokker_planck_residual(empirical_density(ens, c.half_width, c.bins), coeffs, bank, &mu0));
  }
  const bool ok = tables[0].max_abs <= 1e-2 && tables[1].max_abs < tables[0].max_abs &&
                  tables[1].rms_abs < tables[0].rms_abs;
  return {ok, fmt("N=1e4 max %.3e rms %.3e; N=4e4 max %.3e rms %.3e", tables[0].max_abs, tables[0].rms_abs,
                  tables[1].max_abs, tables[1].rms_abs)};
}

Outcome cauchy_trend(Pipeline& powerlaw) {
  std::map<int, const PathEnsemble*> by_level;
  for (const auto& run : powerlaw.levels()) by_level[run.level] = &run.ensemble;
  for (int n = 2; n <= 5; ++n)
    if (!by_level.count(n)) return {false, "levels 2..5 were not simulated"};
  const double T = powerlaw.config().time_horizon;
  const std::vector<double> probes{T / 4.0, T / 2.0, T};
  std::vector<std::vector<double>> w1(3);  // [probe][n - 2]
  for (int n = 2; n <= 4; ++n) {
    const auto dist = convergence_in_law_diagnostic(*by_level[n], *by_level[n + 1], probes);
    for (std::size_t j = 0; j < probes.size(); ++j)
      w1[j].push_back(*std::max_element(dist[j].w1.begin(), dist[j].w1.end()));
  }
  bool ok = true;
  std::string detail;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    ok = ok && w1[j][0] > w1[j][1] && w1[j][1] > w1[j][2];
    detail += fmt("t=%.2f: %.4f %.4f %.4f; ", probes[j], w1[j][0], w1[j][1], w1[j][2]);
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome negative_control() {
  ExperimentConfig c = preset_config("negative-control");
  c.output_dir = scratch("negative");
  const PipelineResult r = run_pipeline(c);
  fs::remove_all(c.output_dir);
  if (r.stages.size() < 2) return {false, "zvonkin stage missing"};
  const Check& props = check_named(r.stages[1], "transform.properties");
  return {!props.passed && r.exit_code != kExitPass,
          fmt("transform.properties %s, exit code %d", props.passed ? "passed" : "failed", r.exit_code)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failures;
    std::printf("%s %2d %-28s %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "decomposition-exactness", decomposition_exactness);
  report(2, "epsilon-identity", epsilon_identity);
  report(3, "pde-order", pde_order);
  report(5, "identity-degeneracy", identity_degeneracy);
  report(6, "monte-carlo-sanity", monte_carlo_sanity);
  report(9, "fokker-planck-residual", fokker_planck);
  report(11, "negative-control", negative_control);

  ExperimentConfig pl = preset_config("powerlaw-singular");
  pl.output_dir = scratch("powerlaw");
  Pipeline powerlaw(pl);
  report(4, "transform-properties", [&] { return transform_properties(powerlaw); });
  StageReport simulate;
  report(7, "moment-bound", [&] {
    simulate = powerlaw.run_simulation();
    return moment_bound(powerlaw, simulate);
  });
  report(8, "density-bound", [&] { return density_bound(powerlaw); });
  report(10, "cauchy-in-law", [&] { return cauchy_trend(powerlaw); });
  fs::remove_all(pl.output_dir);

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
