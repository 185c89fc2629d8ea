#pragma once

#include <functional>
#include <vector>

#include "ssde/simulation.hpp"
#include "ssde/zvonkin.hpp"

namespace ssde {

struct MomentEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half width
  Index n_used = 0;
  std::vector<double> values;  // per surviving path
};

/// Mean over never-exited paths of sup_t |X_t| + [X]_gamma on the report grid.
MomentEstimate holder_moment_estimate(const PathEnsemble& ens, double gamma);

struct IntegrabilityRow {
  double radius = 0.0;
  std::vector<double> per_level;  // E[S 1{S > R}], S = sup_t |X_t|
  double sup = 0.0;
};

struct IntegrabilityTable {
  std::vector<IntegrabilityRow> rows;
  bool nonincreasing = true;
};

IntegrabilityTable uniform_integrability_diagnostic(const std::vector<const PathEnsemble*>& levels,
                                                    const std::vector<double>& radii);

/// W1 between two empirical laws on the line: integral of |F_a - F_b|.
double wasserstein1(std::vector<double> a, std::vector<double> b);
/// 2E|X-Y| - E|X-X'| - E|Y-Y'| (V-statistic form, nonnegative).
double energy_distance(const std::vector<Point>& a, const std::vector<Point>& b);

struct LawDistance {
  double time = 0.0;
  std::vector<double> w1;  // per coordinate
  double energy = 0.0;
};

/// Distances between the time marginals of two ensembles at the probe times.
/// Energy distances use at most max_energy_samples paths from each side.
/// Throws ErrorKind::Parameter when a probe time is missing from either grid.
std::vector<LawDistance> convergence_in_law_diagnostic(const PathEnsemble& a, const PathEnsemble& b,
                                                       const std::vector<double>& probe_times,
                                                       Index max_energy_samples = 2000);

struct DriftResidual {
  double b1 = 0.0;
  double b2 = 0.0;
};

/// E[ int_0^T psi_R(X_t) |b^{i,n}(X_t) - b^{i,m}(X_t)| dt ], i = 1, 2, with the
/// left-point rule on the report grid of ens and psi_R = cutoff_profile(|x|/R).
DriftResidual drift_residual_diagnostic(const PathEnsemble& ens, const CoefficientSet& level_n,
                                        const CoefficientSet& level_m, double radius);

struct WeakSolutionStats {
  Index paths = 0;
  Index survivors = 0;
  double max_identity_residual = 0.0;  // |X_T - X_0 - int b dt - sum sigma sqrt(dt) xi|
  double max_drift_integral = 0.0;     // int |b(X_s)| ds
  double mean_drift_integral = 0.0;
  double max_sigma_integral = 0.0;     // int |sigma(X_s)|^2 ds (spectral norm)
  Index finite_integrals = 0;
};

/// Regenerates the paths of (coeffs, mu0, options) and checks the integral
/// identity of a weak solution path by path.
WeakSolutionStats weak_solution_residual(const CoefficientSet& coeffs, const InitialLaw& mu0,
                                         const SimulationOptions& options);

struct MartingaleNorms {
  std::vector<double> holder_norm;  // ||Z||_{C^gamma} on the report grid
  std::vector<std::int64_t> exit_step;
};

/// Regenerates the paths and accumulates Z_t = int DPhi(X) sigma(X) dW with the
/// same increments; returns sup|Z| + [Z]_gamma per path.
MartingaleNorms transformed_martingale_norms(const CoefficientSet& coeffs, const InitialLaw& mu0,
                                             const SimulationOptions& options,
                                             const ZvonkinSolution& sol, double gamma);

struct MarginalStats {
  Index n = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
};
MarginalStats marginal_stats(const std::vector<double>& samples);

/// Coordinate c of X at a report index over never-exited paths.
std::vector<double> marginal_samples(const PathEnsemble& ens, int report_index, int coordinate);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
/// One-sample Kolmogorov-Smirnov test with Stephens' small-sample correction.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

double normal_cdf(double x);

}  // namespace ssde
