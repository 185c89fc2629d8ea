#include "ssde/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssde/norms.hpp"
#include "ssde/parallel.hpp"

namespace ssde {

MomentEstimate holder_moment_estimate(const PathEnsemble& ens, double gamma) {
  MomentEstimate est;
  std::vector<double> all(ens.n_paths(), -1.0);
  parallel_for(static_cast<std::size_t>(ens.n_paths()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      if (ens.exited(static_cast<Index>(p))) continue;
      all[p] = holder_norm(ens.times, ens.path_matrix(static_cast<Index>(p)), gamma);
    }
  });
  for (double v : all)
    if (v >= 0.0) est.values.push_back(v);
  est.n_used = static_cast<Index>(est.values.size());
  if (est.n_used == 0) return est;
  const MarginalStats s = marginal_stats(est.values);
  est.mean = s.mean;
  est.half_width = 1.96 * s.mean_se;
  return est;
}

IntegrabilityTable uniform_integrability_diagnostic(const std::vector<const PathEnsemble*>& levels,
                                                    const std::vector<double>& radii) {
  require(levels.size() >= 2 && radii.size() >= 3, ErrorKind::Parameter,
          "uniform integrability needs at least two levels and three radii");
  std::vector<std::vector<double>> sups;
  for (const PathEnsemble* ens : levels) {
    std::vector<double> s;
    for (Index p = 0; p < ens->n_paths(); ++p) {
      if (ens->exited(p)) continue;
      s.push_back(ens->path_matrix(p).rowwise().norm().maxCoeff());
    }
    sups.push_back(std::move(s));
  }
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  IntegrabilityTable table;
  for (double R : sorted) {
    IntegrabilityRow row{.radius = R};
    for (const auto& s : sups) {
      double acc = 0.0;
      for (double v : s)
        if (v > R) acc += v;
      row.per_level.push_back(s.empty() ? 0.0 : acc / static_cast<double>(s.size()));
    }
    row.sup = *std::max_element(row.per_level.begin(), row.per_level.end());
    if (!table.rows.empty() && row.sup > table.rows.back().sup) table.nonincreasing = false;
    table.rows.push_back(std::move(row));
  }
  return table;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::Parameter, "W1 needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double x = std::min(a[0], b[0]);
  double dist = 0.0;
  while (i < a.size() || j < b.size()) {
    double next;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      next = a[i];
    } else {
      next = b[j];
    }
    dist += std::abs(i / na - j / nb) * (next - x);
    x = next;
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
  }
  return dist;
}

namespace {

double mean_pair_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  double acc = 0.0;
  for (const Point& x : a)
    for (const Point& y : b) acc += (x - y).norm();
  return acc / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double energy_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  require(!a.empty() && !b.empty(), ErrorKind::Parameter, "energy distance needs two nonempty samples");
  return std::max(0.0, 2.0 * mean_pair_distance(a, b) - mean_pair_distance(a, a) -
                           mean_pair_distance(b, b));
}

namespace {

int report_index_of(const PathEnsemble& ens, double t) {
  for (int k = 0; k < ens.n_times(); ++k) {
    if (std::abs(ens.times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  }
  fail(ErrorKind::Parameter, "probe time " + std::to_string(t) + " is not on the report grid");
}

std::vector<Point> joint_samples(const PathEnsemble& ens, int k, Index cap) {
  std::vector<Point> out;
  for (Index p = 0; p < ens.n_paths() && static_cast<Index>(out.size()) < cap; ++p) {
    if (!ens.exited(p)) out.push_back(ens.state(p, k));
  }
  return out;
}

}  // namespace

std::vector<LawDistance> convergence_in_law_diagnostic(const PathEnsemble& a, const PathEnsemble& b,
                                                       const std::vector<double>& probe_times,
                                                       Index max_energy_samples) {
  require(a.dim == b.dim, ErrorKind::Parameter, "ensembles have different dimensions");
  std::vector<LawDistance> out;
  for (double t : probe_times) {
    const int ka = report_index_of(a, t);
    const int kb = report_index_of(b, t);
    LawDistance ld{.time = t};
    for (int c = 0; c < a.dim; ++c) {
      ld.w1.push_back(wasserstein1(marginal_samples(a, ka, c), marginal_samples(b, kb, c)));
    }
    ld.energy = energy_distance(joint_samples(a, ka, max_energy_samples),
                                joint_samples(b, kb, max_energy_samples));
    out.push_back(std::move(ld));
  }
  return out;
}

DriftResidual drift_residual_diagnostic(const PathEnsemble& ens, const CoefficientSet& level_n,
                                        const CoefficientSet& level_m, double radius) {
  require(radius > 0.0, ErrorKind::Parameter, "cutoff radius must be positive");
  DriftResidual r;
  Index used = 0;
  for (Index p = 0; p < ens.n_paths(); ++p) {
    if (ens.exited(p)) continue;
    ++used;
    for (int k = 0; k + 1 < ens.n_times(); ++k) {
      const double dt = ens.times[k + 1] - ens.times[k];
      const Point x = ens.state(p, k);
      const double w = cutoff_profile(x.norm() / radius) * dt;
      if (w == 0.0) continue;
      const Stencil sn = locate(level_n.grid(), ens.times[k], x);
      const Stencil sm = locate(level_m.grid(), ens.times[k], x);
      r.b1 += w * (level_n.b1.evaluate(sn) - level_m.b1.evaluate(sm)).norm();
      r.b2 += w * (level_n.b2.evaluate(sn) - level_m.b2.evaluate(sm)).norm();
    }
  }
  if (used > 0) {
    r.b1 /= static_cast<double>(used);
    r.b2 /= static_cast<double>(used);
  }
  return r;
}

WeakSolutionStats weak_solution_residual(const CoefficientSet& coeffs, const InitialLaw& mu0,
                                         const SimulationOptions& o) {
  const Grid& g = coeffs.grid();
  const int d = g.dim();
  const int steps = step_count(g, o);
  const double root_dt = std::sqrt(o.dt);
  struct PerPath {
    double residual = 0.0, drift = 0.0, sigma = 0.0;
    bool survived = false;
  };
  std::vector<PerPath> per(o.n_paths);
  parallel_for(static_cast<std::size_t>(o.n_paths), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Point x0 = mu0.sample(o.seed, static_cast<Index>(p), g);
      Point drift_sum = Point::Zero(d);
      Point noise_sum = Point::Zero(d);
      Point last = x0;
      PerPath& r = per[p];
      const auto exit = simulate_path(coeffs, x0, static_cast<Index>(p), steps, o.dt, o.seed,
                                      [&](const EulerStep& s) {
                                        drift_sum += s.drift * o.dt;
                                        noise_sum += s.sigma * (root_dt * s.xi);
                                        r.drift += s.drift.norm() * o.dt;
                                        r.sigma += std::pow(operator_norm(s.sigma), 2) * o.dt;
                                        last = s.next;
                                      });
      r.survived = exit < 0;
      r.residual = (last - x0 - drift_sum - noise_sum).cwiseAbs().maxCoeff();
    }
  });
  WeakSolutionStats st;
  st.paths = o.n_paths;
  double drift_total = 0.0;
  for (const PerPath& r : per) {
    st.max_identity_residual = std::max(st.max_identity_residual, r.residual);
    if (!r.survived) continue;
    ++st.survivors;
    if (std::isfinite(r.drift) && std::isfinite(r.sigma)) ++st.finite_integrals;
    st.max_drift_integral = std::max(st.max_drift_integral, r.drift);
    st.max_sigma_integral = std::max(st.max_sigma_integral, r.sigma);
    drift_total += r.drift;
  }
  if (st.survivors > 0) st.mean_drift_integral = drift_total / static_cast<double>(st.survivors);
  return st;
}

MartingaleNorms transformed_martingale_norms(const CoefficientSet& coeffs, const InitialLaw& mu0,
                                             const SimulationOptions& o, const ZvonkinSolution& sol,
                                             double gamma) {
  const Grid& g = coeffs.grid();
  const int d = g.dim();
  const int steps = step_count(g, o);
  const int n_times = steps / o.report_every + 1;
  const double root_dt = std::sqrt(o.dt);
  std::vector<double> times(n_times);
  for (int j = 0; j < n_times; ++j) times[j] = j * o.report_every * o.dt;
  MartingaleNorms out;
  out.holder_norm.assign(o.n_paths, 0.0);
  out.exit_step.assign(o.n_paths, -1);
  parallel_for(static_cast<std::size_t>(o.n_paths), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      RowMatrix z = RowMatrix::Zero(n_times, d);
      Point acc = Point::Zero(d);
      const Point x0 = mu0.sample(o.seed, static_cast<Index>(p), g);
      const auto exit = simulate_path(
          coeffs, x0, static_cast<Index>(p), steps, o.dt, o.seed, [&](const EulerStep& s) {
            acc += phi_jacobian(sol, s.t, s.x) * (s.sigma * (root_dt * s.xi));
            const int k = s.step + 1;
            if (k % o.report_every == 0) z.row(k / o.report_every) = acc.transpose();
          });
      out.exit_step[p] = exit;
      if (exit < 0) out.holder_norm[p] = holder_norm(times, z, gamma);
    }
  });
  return out;
}

MarginalStats marginal_stats(const std::vector<double>& x) {
  MarginalStats s;
  s.n = static_cast<Index>(x.size());
  if (s.n < 2) {
    s.mean = s.n == 1 ? x[0] : 0.0;
    return s;
  }
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double c = (v - s.mean) * (v - s.mean);
    m2 += c;
    m4 += c * c;
  }
  s.variance = m2 / (n - 1.0);
  s.mean_se = std::sqrt(s.variance / n);
  const double mu2 = m2 / n;
  s.variance_se = std::sqrt(std::max(0.0, m4 / n - mu2 * mu2) / n);
  return s;
}

std::vector<double> marginal_samples(const PathEnsemble& ens, int report_index, int coordinate) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ens.n_paths()));
  for (Index p = 0; p < ens.n_paths(); ++p) {
    if (!ens.exited(p)) out.push_back(ens.state(p, report_index)[coordinate]);
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), ErrorKind::Parameter, "KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double D = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  const double root_n = std::sqrt(n);
  const double lambda = (root_n + 0.12 + 0.11 / root_n) * D;
  if (lambda < 0.2) return {D, 1.0};
  double q = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    q += term;
    if (std::abs(term) < 1e-12) break;
  }
  return {D, std::clamp(q, 0.0, 1.0)};
}

}  // namespace ssde
