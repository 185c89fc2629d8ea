#include "ssde/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "ssde/diagnostics.hpp"
#include "ssde/field_io.hpp"
#include "ssde/norms.hpp"
#include "ssde/parallel.hpp"

namespace ssde {

bool StageReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.gating || c.passed; });
}

Json StageReport::to_json() const {
  Json j;
  j["stage"] = stage;
  j["passed"] = passed();
  Json list = Json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"gating", c.gating}, {"passed", c.passed}, {"values", c.values}});
  }
  j["checks"] = list;
  return j;
}

namespace {

Json point_json(const Point& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

Json witness_json(const PairWitness& w) {
  return {{"ratio", w.ratio}, {"t", w.t}, {"x", point_json(w.x)}, {"y", point_json(w.y)}};
}

template <class Fn>
auto staged(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const CalibrationError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), stage + ": " + e.what());
  }
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double relative_spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? (*hi - *lo) / *lo : 0.0;
}

}  // namespace

Pipeline::Pipeline(ExperimentConfig config) : config_(std::move(config)) {}

double Pipeline::epsilon() const {
  return critical_epsilon(config_.exponent_p, config_.exponent_q, config_.dim);
}

const CoefficientSet& Pipeline::coefficients() {
  if (!coeffs_) coeffs_ = build_coefficients(config_);
  return *coeffs_;
}

const InitialLaw& Pipeline::initial_law() {
  if (!law_) law_ = build_initial_law(config_);
  return *law_;
}

const ZvonkinSolution* Pipeline::zvonkin_solution() {
  if (!zvonkin_done_) {
    const CoefficientSet& c = coefficients();
    const SpaceTimeField a = diffusion_tensor(c.sigma);
    if (config_.force_lambda) {
      ZvonkinSolution s = solve_backward_pde(a, c.b2, c.b2, *config_.force_lambda);
      s.lambda_bar = *config_.force_lambda;
      s.lambda_history = {{s.lambda_bar, s.c0c1_norm}};
      sol_ = std::move(s);
    } else {
      try {
        sol_ = calibrate_lambda(a, c.b2, config_.lambda0);
      } catch (const CalibrationError& e) {
        calibration_error_ = e;
      }
    }
    zvonkin_done_ = true;
  }
  return sol_ ? &*sol_ : nullptr;
}

const std::vector<LevelRun>& Pipeline::levels() {
  if (!levels_) {
    std::vector<LevelRun> runs;
    const SimulationOptions opts = config_.simulation();
    for (int n = config_.level_min; n <= config_.level_max; ++n) {
      CoefficientSet cn = mollified_sequence(coefficients(), n, config_.mollifier_delta0);
      PathEnsemble ens = euler_maruyama(cn, initial_law(), opts, n);
      runs.push_back({n, std::ldexp(config_.mollifier_delta0, -n), std::move(cn), std::move(ens)});
    }
    levels_ = std::move(runs);
  }
  return *levels_;
}

StageReport Pipeline::run_decomposition() {
  return staged("decompose", [&] {
    StageReport r{.stage = "decompose"};
    const CoefficientSet& c = coefficients();
    const int d = config_.dim;

    const EllipticityReport ell = check_ellipticity(c.sigma, c.ellipticity_K);
    r.checks.push_back({"assumptions.ellipticity", true, ell.ok,
                        {{"K", c.ellipticity_K},
                         {"min_singular_sq", ell.min_singular_sq},
                         {"max_singular_sq", ell.max_singular_sq},
                         {"worst_time_index", ell.worst_time_index},
                         {"worst_node", ell.worst_node}}});

    const double eps = epsilon();
    const SpaceTimeField drift = combine(1.0, c.b1, 1.0, c.b2);
    if (config_.exponent_q == kInf) {
      r.checks.push_back({"decomposition.bounds", false, true,
                          {{"skipped", "q = inf: the drift needs no split"}, {"epsilon", eps}}});
    } else {
      const DecompositionResult dr = decompose(drift, config_.exponent_p, config_.exponent_q, config_.uniformly_local);
      const SpaceTimeField sum = combine(1.0, dr.f_le, 1.0, dr.f_gt);
      const bool exact = sum.values() == drift.values();
      const bool gt_ok = dr.certified_gt_norm <= dr.gt_bound * (1.0 + 1e-6);
      const bool le_ok = dr.certified_le_norm <= dr.le_bound * (1.0 + 1e-9) + 1e-12;
      r.checks.push_back({"decomposition.exactness", true, exact, {{"bit_exact", exact}}});
      r.checks.push_back({"decomposition.bounds", true, gt_ok && le_ok,
                          {{"p", dr.p},
                           {"q", dr.q},
                           {"epsilon", dr.epsilon},
                           {"uniformly_local", dr.uniformly_local},
                           {"gt_norm", dr.certified_gt_norm},
                           {"gt_bound", dr.gt_bound},
                           {"gt_margin", dr.gt_margin()},
                           {"le_norm", dr.certified_le_norm},
                           {"le_bound", dr.le_bound},
                           {"le_margin", dr.le_margin()}}});
      Table t{{"time_index", "time", "slice_norm", "threshold", "gt_norm"}, {}};
      for (std::size_t k = 0; k < dr.slice_norms.size(); ++k) {
        t.rows.push_back({static_cast<double>(k), c.grid().time(static_cast<int>(k)), dr.slice_norms[k],
                          dr.thresholds[k], dr.gt_slice_norms[k]});
      }
      r.tables["decomposition_slices"] = std::move(t);
    }

    std::vector<double> b2_norms, b1_env;
    for (int k = 0; k < c.grid().time_steps(); ++k) {
      b2_norms.push_back(lp_space_norm(c.grid(), c.b2.slice(k), d + eps));
      b1_env.push_back(linear_growth_envelope(c.grid(), c.b1.slice(k)));
    }
    r.checks.push_back({"split.profile", false, std::isfinite(max_of(b1_env)),
                        {{"mode", config_.split == SplitMode::Direct ? "direct" : "exponents"},
                         {"b2_space_norm_max", max_of(b2_norms)},
                         {"b2_space_exponent", d + eps},
                         {"b1_envelope_max", max_of(b1_env)}}});
    return r;
  });
}

StageReport Pipeline::run_zvonkin() {
  return staged("zvonkin", [&] {
    StageReport r{.stage = "zvonkin"};
    const ZvonkinSolution* sol = zvonkin_solution();
    Table hist{{"lambda", "c0c1_norm"}, {}};
    if (!sol) {
      r.checks.push_back({"zvonkin.calibration", true, false,
                          {{"error", calibration_error_->what()},
                           {"achieved_norm", calibration_error_->achieved_norm()},
                           {"last_lambda", calibration_error_->last_lambda()}}});
      return r;
    }
    for (const auto& s : sol->lambda_history) hist.rows.push_back({s.lambda, s.c0c1_norm});
    r.tables["lambda_history"] = std::move(hist);
    r.checks.push_back({"zvonkin.calibration", true, sol->c0c1_norm <= 0.5,
                        {{"lambda_bar", sol->lambda_bar},
                         {"forced", config_.force_lambda.has_value()},
                         {"c0c1_norm", sol->c0c1_norm},
                         {"c0c1_bound", 0.5},
                         {"c_half_t_norm", sol->c_half_t_norm},
                         {"residual_linf", sol->residual_linf},
                         {"max_solver_iterations", sol->max_solver_iterations}}});

    const TransformPropertyReport tp = verify_transform_properties(*sol, config_.transform_pairs, config_.seed);
    r.checks.push_back({"transform.properties", true, tp.passed,
                        {{"pairs", tp.pairs},
                         {"tolerance", tp.tolerance},
                         {"phi_min_ratio", tp.phi_min_ratio},
                         {"phi_max_ratio", tp.phi_max_ratio},
                         {"inverse_min_ratio", tp.inverse_min_ratio},
                         {"inverse_max_ratio", tp.inverse_max_ratio},
                         {"phi_violations", tp.phi_violations},
                         {"inverse_violations", tp.inverse_violations},
                         {"inverse_failures", tp.inverse_failures},
                         {"phi_worst", witness_json(tp.phi_worst)},
                         {"inverse_worst", witness_json(tp.inverse_worst)},
                         {"phi_time_constant", tp.phi_time_constant},
                         {"inverse_time_constant", tp.inverse_time_constant},
                         {"c_half_t_norm", tp.c_half_t_norm},
                         {"time_violations", tp.time_violations},
                         {"max_roundtrip_error", tp.max_roundtrip_error},
                         {"max_inverse_iterations", tp.max_inverse_iterations}}});

    const TransformedCoefficients tc = transformed_coefficients(coefficients(), *sol, epsilon());
    r.checks.push_back({"transform.envelope", true, tc.certificate_ok,
                        {{"h_l1", tc.h_l1},
                         {"h_l1e", tc.h_l1e},
                         {"sigma_sup", tc.sigma_sup},
                         {"sigma_tilde_sup", tc.sigma_tilde_sup},
                         {"min_envelope_margin",
                          tc.envelope_margin.empty()
                              ? 0.0
                              : *std::min_element(tc.envelope_margin.begin(), tc.envelope_margin.end())},
                         {"excluded_nodes", tc.excluded_nodes}}});
    Table env{{"time_index", "time", "h", "envelope_b_tilde", "margin"}, {}};
    for (std::size_t k = 0; k < tc.h.size(); ++k) {
      env.rows.push_back({static_cast<double>(k), coefficients().grid().time(static_cast<int>(k)), tc.h[k],
                          tc.envelope_b_tilde[k], tc.envelope_margin[k]});
    }
    r.tables["envelope"] = std::move(env);
    return r;
  });
}

StageReport Pipeline::run_simulation() {
  return staged("simulate", [&] {
    StageReport r{.stage = "simulate"};
    const auto& runs = levels();
    const SimulationOptions opts = config_.simulation();
    const double gamma = holder_exponent();
    const double L = config_.half_width;
    const ZvonkinSolution* sol = zvonkin_solution();

    Json exit_values = Json::object(), weak_values = Json::object(), moment_values = Json::object(),
         bound_values = Json::object();
    bool exit_ok = true, weak_ok = true, moments_ok = true, bound_ok = sol != nullptr;
    std::vector<double> means;
    Table moments{{"level", "delta", "exit_fraction", "moment_mean", "moment_half_width", "path_bound_fraction"}, {}};

    for (const auto& run : runs) {
      const std::string key = "level_" + std::to_string(run.level);
      const PathEnsemble& ens = run.ensemble;
      const double exit_fraction = ens.exit_fraction();
      exit_ok = exit_ok && exit_fraction <= 0.01;
      exit_values[key] = {{"exit_fraction", exit_fraction}, {"survivors", ens.survivors()}};

      const WeakSolutionStats ws = weak_solution_residual(run.coeffs, initial_law(), opts);
      weak_ok = weak_ok && ws.max_identity_residual <= 1e-10 && ws.finite_integrals == ws.survivors;
      weak_values[key] = {{"max_identity_residual", ws.max_identity_residual},
                          {"max_drift_integral", ws.max_drift_integral},
                          {"mean_drift_integral", ws.mean_drift_integral},
                          {"max_sigma_integral", ws.max_sigma_integral},
                          {"finite_integrals", ws.finite_integrals},
                          {"survivors", ws.survivors}};

      const MomentEstimate me = holder_moment_estimate(ens, gamma);
      moments_ok = moments_ok && std::isfinite(me.mean);
      means.push_back(me.mean);
      moment_values[key] = {{"mean", me.mean}, {"half_width", me.half_width}, {"paths", me.n_used}};

      double fraction = 0.0;
      if (sol) {
        const MartingaleNorms z = transformed_martingale_norms(run.coeffs, initial_law(), opts, *sol, gamma);
        const GrowthEnvelope h = growth_envelope_h(run.coeffs, sol->lambda_bar, epsilon());
        const PathBoundConstants pc{.lambda_bar = sol->lambda_bar,
                                    .h_l1 = h.l1,
                                    .h_l1e = h.l1e,
                                    .c_half_t_norm = sol->c_half_t_norm,
                                    .time_horizon = config_.time_horizon,
                                    .epsilon = epsilon(),
                                    .min_time_gap = ens.times.size() > 1 ? ens.times[1] - ens.times[0] : 0.0};
        Index counted = 0, under = 0;
        for (Index p = 0; p < ens.n_paths(); ++p) {
          if (ens.exited(p) || z.exit_step[p] >= 0) continue;
          ++counted;
          const double value = holder_norm(ens.times, ens.path_matrix(p), gamma);
          if (value <= x_path_bound(ens.state(p, 0).norm(), z.holder_norm[p], pc)) ++under;
        }
        fraction = counted > 0 ? static_cast<double>(under) / static_cast<double>(counted) : 0.0;
        bound_ok = bound_ok && fraction >= 0.99;
        bound_values[key] = {{"fraction_under_bound", fraction}, {"paths", counted}, {"h_l1", h.l1}, {"h_l1e", h.l1e}};
      }
      moments.rows.push_back({static_cast<double>(run.level), run.delta, exit_fraction, me.mean, me.half_width, fraction});
    }
    moment_values["relative_spread"] = relative_spread(means);
    moment_values["holder_exponent"] = gamma;
    if (!sol) bound_values["error"] = "no Zvonkin solution: calibration failed";

    r.checks.push_back({"simulation.exit_fraction", true, exit_ok, exit_values});
    r.checks.push_back({"simulation.weak_identity", true, weak_ok, weak_values});
    r.checks.push_back({"simulation.holder_moments", true, moments_ok, moment_values});
    r.checks.push_back({"simulation.path_bound", true, bound_ok, bound_values});
    r.tables["moments"] = std::move(moments);

    if (runs.size() >= 2) {
      std::vector<const PathEnsemble*> ptrs;
      for (const auto& run : runs) ptrs.push_back(&run.ensemble);
      const IntegrabilityTable ui = uniform_integrability_diagnostic(ptrs, {L / 8.0, L / 4.0, L / 2.0});
      Json ui_values = Json::object();
      Table ui_table{{"radius", "sup"}, {}};
      for (const auto& run : runs) ui_table.columns.push_back("level_" + std::to_string(run.level));
      for (const auto& row : ui.rows) {
        ui_values["radius_" + io::format_real(row.radius)] = {{"per_level", row.per_level}, {"sup", row.sup}};
        std::vector<double> line{row.radius, row.sup};
        line.insert(line.end(), row.per_level.begin(), row.per_level.end());
        ui_table.rows.push_back(std::move(line));
      }
      ui_values["nonincreasing"] = ui.nonincreasing;
      r.checks.push_back({"diagnostics.uniform_integrability", false, ui.nonincreasing, ui_values});
      r.tables["integrability"] = std::move(ui_table);
    }

    if (runs.size() >= 2) {
      // Quarter, half and full horizon, snapped to the report grid.
      const auto& times = runs.front().ensemble.times;
      std::vector<double> probes;
      for (double frac : {0.25, 0.5, 1.0}) {
        const double target = frac * config_.time_horizon;
        probes.push_back(*std::min_element(times.begin(), times.end(), [&](double a, double b) {
          return std::abs(a - target) < std::abs(b - target);
        }));
      }
      Json cauchy = Json::object();
      Table law{{"level", "time", "w1_max", "energy"}, {}};
      std::vector<std::vector<double>> w1_by_probe(probes.size());
      for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const auto dist = convergence_in_law_diagnostic(runs[i].ensemble, runs[i + 1].ensemble, probes);
        Json per = Json::array();
        for (std::size_t j = 0; j < dist.size(); ++j) {
          const double w1 = max_of(dist[j].w1);
          w1_by_probe[j].push_back(w1);
          per.push_back({{"time", dist[j].time}, {"w1", dist[j].w1}, {"energy", dist[j].energy}});
          law.rows.push_back({static_cast<double>(runs[i].level), dist[j].time, w1, dist[j].energy});
        }
        cauchy["levels_" + std::to_string(runs[i].level) + "_" + std::to_string(runs[i + 1].level)] = per;
      }
      bool decreasing = true;
      for (const auto& series : w1_by_probe) {
        for (std::size_t i = 0; i + 1 < series.size(); ++i) decreasing = decreasing && series[i + 1] < series[i];
      }
      cauchy["w1_strictly_decreasing"] = decreasing;
      r.checks.push_back({"diagnostics.cauchy_in_law", false, decreasing, cauchy});
      r.tables["law_distance"] = std::move(law);

      Json ladder = Json::object();
      const CoefficientSet& top = runs.back().coeffs;
      for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const DriftResidual dr = drift_residual_diagnostic(runs[i].ensemble, runs[i].coeffs, top, L / 2.0);
        ladder["level_" + std::to_string(runs[i].level)] = {{"b1", dr.b1}, {"b2", dr.b2}};
      }
      r.checks.push_back({"diagnostics.drift_ladder", false, true, ladder});
    }
    return r;
  });
}

StageReport Pipeline::run_density() {
  return staged("density", [&] {
    StageReport r{.stage = "density"};
    const auto& runs = levels();
    const Grid grid = coefficients().grid();
    const double first_moment = initial_law().first_moment(grid);

    std::vector<EmpiricalDensity> dens;
    for (const auto& run : runs) dens.push_back(empirical_density(run.ensemble, config_.half_width, config_.bins));
    std::vector<const EmpiricalDensity*> ptrs;
    for (const auto& e : dens) ptrs.push_back(&e);

    const auto uniformity = density_uniformity(ptrs, config_.density_exponents, first_moment);
    Json uni = Json::object();
    bool bounded = true;
    Table norms{{"p_tilde", "q_tilde", "level", "norm"}, {}};
    for (const auto& u : uniformity) {
      bounded = bounded && u.bounded;
      uni["p" + io::format_real(u.p_tilde) + "_q" + io::format_real(u.q_tilde)] = {
          {"norms", u.norms}, {"sup", u.sup},           {"spread", u.spread},
          {"constant", u.constant}, {"ceiling", u.ceiling}, {"bounded", u.bounded}};
      for (std::size_t i = 0; i < u.norms.size(); ++i) {
        norms.rows.push_back({u.p_tilde, u.q_tilde, static_cast<double>(runs[i].level), u.norms[i]});
      }
    }
    uni["first_moment"] = first_moment;
    uni["reference_level"] = runs.front().level;
    r.checks.push_back({"density.uniformity", true, bounded, uni});
    r.tables["density_norms"] = std::move(norms);

    const EmpiricalDensity& top = dens.back();
    const CoefficientSet& top_coeffs = runs.back().coeffs;
    const ResidualTable fp = fokker_planck_residual(top, top_coeffs, fixed_test_bank(config_.dim), &initial_law());
    r.checks.push_back({"density.fokker_planck", false, fp.max_abs <= 1e-2,
                        {{"level", runs.back().level},
                         {"max_abs", fp.max_abs},
                         {"max_relative", fp.max_relative},
                         {"rms_abs", fp.rms_abs},
                         {"drift_l1", fp.drift_l1},
                         {"diffusion_l1", fp.diffusion_l1},
                         {"threshold", 1e-2}}});
    Table fpt{{"scale", "time_profile", "skipped", "residual", "relative"}, {}};
    for (int a = 0; a < config_.dim; ++a) fpt.columns.insert(fpt.columns.begin() + a, "center_" + std::to_string(a));
    for (const auto& e : fp.entries) {
      std::vector<double> line(e.test.center.data(), e.test.center.data() + e.test.center.size());
      line.insert(line.end(), {e.test.scale, static_cast<double>(e.test.time_profile),
                               e.skipped ? 1.0 : 0.0, e.residual, e.relative});
      fpt.rows.push_back(std::move(line));
    }
    r.tables["fp_residual"] = std::move(fpt);

    // Scalar probe: a Gaussian bump plus the size of the singular drift, rescaled
    // per exponent pair to dual norm 1/4 so that both parts of the split are nonempty.
    const SpaceTimeField& b2 = top_coeffs.b2;
    const SpaceTimeField f = SpaceTimeField::from_function(grid, 1, [&](double t, const Point& x) {
      Value v(1);
      v[0] = (1.0 + t) * std::exp(-x.squaredNorm()) + b2.evaluate(t, x).norm();
      return v;
    });
    const ZvonkinSolution* sol = zvonkin_solution();
    const double lambda = sol ? sol->lambda_bar : config_.lambda0;
    Json dual = Json::object();
    bool dual_ok = true;
    for (const auto& [pt, qt] : config_.density_exponents) {
      const double dual_norm = mixed_norm(f, MixedNormSpec{.q = qt / (qt - 1.0), .p = pt / (pt - 1.0)});
      const SpaceTimeField probe = combine(0.25 / dual_norm, f, 0.0, f);
      const DualityCheck dc = duality_check(probe, top, runs.back().ensemble, top_coeffs, pt, qt, lambda);
      dual_ok = dual_ok && dc.le_ok && dc.gt_ok;
      dual["p" + io::format_real(pt) + "_q" + io::format_real(qt)] = {
          {"dual_norm", dc.dual_norm},   {"pairing", dc.pairing},       {"le_pairing", dc.le_pairing},
          {"le_bound", dc.le_bound},     {"gt_pairing", dc.gt_pairing}, {"gt_bound", dc.gt_bound},
          {"lambda", dc.lambda},         {"empirical_constant", dc.empirical_constant},
          {"le_ok", dc.le_ok},           {"gt_ok", dc.gt_ok}};
    }
    r.checks.push_back({"density.duality", true, dual_ok, dual});
    return r;
  });
}

void Pipeline::write(const StageReport& report) const {
  std::filesystem::create_directories(config_.output_dir);
  {
    std::ofstream out(config_.output_dir / (report.stage + ".json"));
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + report.stage + ".json");
    out << report.to_json().dump(2) << '\n';
  }
  for (const auto& [name, table] : report.tables) {
    std::ofstream out(config_.output_dir / (name + ".csv"));
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + name + ".csv");
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << io::format_real(row[i]);
      out << '\n';
    }
  }
}

void Pipeline::write_metadata(const std::vector<std::string>& stages) const {
  std::filesystem::create_directories(config_.output_dir);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  const Json meta{{"written_at", stamp},
                  {"threads", thread_count()},
                  {"stages", stages},
                  {"preset", config_.preset},
                  {"seed", config_.seed}};
  std::ofstream out(config_.output_dir / "metadata.json");
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write metadata.json");
  out << meta.dump(2) << '\n';
}

PipelineResult run_pipeline(const ExperimentConfig& config) {
  Pipeline p(config);
  PipelineResult result;
  std::vector<std::string> names;
  auto record = [&](StageReport r) {
    p.write(r);
    names.push_back(r.stage);
    result.stages.push_back(std::move(r));
  };
  record(p.run_decomposition());
  record(p.run_zvonkin());
  if (p.zvonkin_solution()) {
    record(p.run_simulation());
    record(p.run_density());
  }
  bool passed = true;
  Json summary{{"stages", Json::object()}};
  for (const auto& s : result.stages) {
    summary["stages"][s.stage] = s.passed();
    passed = passed && s.passed();
  }
  summary["passed"] = passed;
  result.exit_code = passed ? kExitPass : kExitCertificate;
  summary["exit_code"] = result.exit_code;
  {
    std::filesystem::create_directories(config.output_dir);
    std::ofstream out(config.output_dir / "summary.json");
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write summary.json");
    out << summary.dump(2) << '\n';
  }
  p.write_metadata(names);
  return result;
}

}  // namespace ssde
