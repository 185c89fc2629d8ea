#pragma once

#include <utility>
#include <vector>

#include "ssde/coefficients.hpp"
#include "ssde/simulation.hpp"

namespace ssde {

/// Histogram of the time marginals on `bins` equal bins per axis over the box.
/// masses(k, b) is the fraction of all paths sitting in bin b at report time k;
/// each row sums to the fraction of paths still inside the box.
struct EmpiricalDensity {
  int dim = 1;
  double half_width = 1.0;
  int bins = 8;
  double bandwidth = 0.0;
  std::vector<double> times;
  RowMatrix masses;                   // n_times x bins^dim
  std::vector<double> alive_fraction; // per time

  double bin_width() const { return 2.0 * half_width / bins; }
  double bin_volume() const;
  Index bin_count() const { return masses.cols(); }
  /// Grid whose nodes are the bin centers (time axis = report times).
  Grid bin_grid() const;
  Point bin_center(Index bin) const;
  /// Density values mass / bin volume as a field on bin_grid().
  SpaceTimeField density_field() const;
};

/// Throws ErrorKind::Parameter for an empty ensemble or fewer than 8 bins.
/// A positive bandwidth smooths each slice with the grid mollifier and
/// restores the slice mass.
EmpiricalDensity empirical_density(const PathEnsemble& ens, double half_width, int bins,
                                   double bandwidth = 0.0);

/// ||rho||_{L^q_t L^p_x} of the piecewise-constant density.
/// Throws ErrorKind::Precondition unless p, q in (1, inf) and 1/q + d/p > d.
double density_mixed_norm(const EmpiricalDensity& density, double p_tilde, double q_tilde);

struct DensityUniformity {
  double p_tilde = 0.0;
  double q_tilde = 0.0;
  std::vector<double> norms;  // per level
  double sup = 0.0;
  double spread = 0.0;        // (max - min) / min
  double constant = 0.0;      // margin * norm at the reference level / (1 + E|X_0|)
  double ceiling = 0.0;       // constant * (1 + E|X_0|)
  bool bounded = false;       // every level norm <= ceiling
};

/// Mixed norms across mollification levels; the reference is the first level.
std::vector<DensityUniformity> density_uniformity(
    const std::vector<const EmpiricalDensity*>& levels,
    const std::vector<std::pair<double, double>>& exponents, double first_moment,
    double margin = 1.15);

/// phi(t, x) = theta(t) psi((x - c)/s) with psi(y) = exp(1 - 1/(1 - |y|^2)) on |y| < 1.
/// theta is 1 for profile 0 and 1 - t/(2T) for profile 1.
struct TestFunction {
  Point center;
  double scale = 1.0;
  int time_profile = 0;
};

/// Centers on {-1, 0, 1}^d, scales {2, 3, 4}, both time profiles.
std::vector<TestFunction> fixed_test_bank(int dim);

struct TestFunctionValue {
  double value = 0.0;
  Point gradient;
  SmallMatrix hessian;
};
TestFunctionValue bump_test_function(const TestFunction& tf, const Point& x);

struct ResidualEntry {
  TestFunction test;
  bool skipped = false;  // support reaches the box boundary
  double residual = 0.0; // <phi_T, mu_T> - <phi_0, mu_0> - int <d_t phi + L phi, mu_t> dt
  double scale = 0.0;    // sum of the absolute sizes of the same terms
  double relative = 0.0; // residual / scale
};

struct ResidualTable {
  std::vector<ResidualEntry> entries;
  double max_abs = 0.0;
  double max_relative = 0.0;
  double rms_abs = 0.0;
  double drift_l1 = 0.0;      // int int |b| d mu dt
  double diffusion_l1 = 0.0;  // int int |a| d mu dt
};

/// Weak-form Fokker-Planck residual of the histogram law: bin averages by
/// panel Gauss rules fine enough for the bump, trapezoid rule over report
/// times. With `initial` the time-0 pairing uses the initial law itself.
ResidualTable fokker_planck_residual(const EmpiricalDensity& density, const CoefficientSet& coeffs,
                                     const std::vector<TestFunction>& bank,
                                     const InitialLaw* initial = nullptr);

/// int_0^T int f d mu_t dt with f read at bin centers (left-endpoint in time).
double duality_pairing(const SpaceTimeField& f, const EmpiricalDensity& density);

struct DualityCheck {
  double p_tilde = 0.0, q_tilde = 0.0;
  double dual_norm = 0.0;  // ||f||_{L^{q'}_t L^{p'}_x}
  double pairing = 0.0;
  double le_pairing = 0.0, le_bound = 0.0;
  double gt_pairing = 0.0, gt_bound = 0.0;
  double lambda = 0.0;
  double empirical_constant = 0.0;  // |pairing| / (dual_norm (1 + E|X_0|))
  bool le_ok = false;
  bool gt_ok = false;
};

/// Splits f by the dual exponents of (p_tilde, q_tilde) and checks both pieces:
/// |<f^<=, mu>| <= int ||f^<=_t||_inf dt, and for f^> the bound
/// ||u_0|| + lambda int ||u_t|| dt + ||Du|| int env(b1_t) (1 + E|X_t|) dt
/// from the PDE with source f^> and drift b2.
DualityCheck duality_check(const SpaceTimeField& f, const EmpiricalDensity& density,
                           const PathEnsemble& ens, const CoefficientSet& coeffs,
                           double p_tilde, double q_tilde, double lambda);

}  // namespace ssde
