#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ssde/coefficients.hpp"
#include "ssde/error.hpp"
#include "ssde/rng.hpp"

namespace ssde {

/// Law of X_0.
struct InitialLaw {
  enum class Kind { Point, Gaussian, Uniform, Empirical };

  Kind kind = Kind::Point;
  Point center;
  double scale = 0.0;          // Gaussian standard deviation, or uniform half width
  std::vector<Point> samples;  // empirical atoms

  static InitialLaw point_mass(const Point& x);
  static InitialLaw gaussian(const Point& mean, double stddev);
  static InitialLaw uniform(const Point& center, double half_width);
  static InitialLaw empirical(std::vector<Point> atoms);

  int dim() const;
  /// Draw for one path. Gaussians are truncated to the grid box by rejection.
  Point sample(std::uint64_t seed, Index path, const Grid& box) const;
  /// E fn(X_0) under the (truncated) law, by quadrature for the continuous laws.
  double expectation(const std::function<double(const Point&)>& fn, const Grid& box) const;
  /// E|X_0| under the (truncated) law.
  double first_moment(const Grid& box) const;
};

std::string to_string(InitialLaw::Kind kind);

struct SimulationOptions {
  Index n_paths = 10000;
  double dt = 1e-3;
  int report_every = 10;  // store every report_every-th step
  std::uint64_t seed = 1;
};

/// Number of Euler steps covering [0, T]; throws ErrorKind::Parameter when dt
/// does not divide T or report_every does not divide the step count.
int step_count(const Grid& grid, const SimulationOptions& options);

/// Paths sampled on the report grid. Row p holds path p, time-major.
/// Path p uses Philox stream p, so any subset of paths can be regenerated.
struct PathEnsemble {
  int dim = 1;
  int level = 0;
  double dt = 0.0;
  int report_every = 1;
  std::uint64_t seed = 0;
  std::vector<double> times;
  RowMatrix paths;
  std::vector<std::int64_t> exit_step;  // first step outside the box, -1 if none

  Index n_paths() const { return paths.rows(); }
  int n_times() const { return static_cast<int>(times.size()); }
  Point state(Index path, int report_index) const {
    return paths.row(path).segment(static_cast<Index>(report_index) * dim, dim).transpose();
  }
  /// Path as a (times x dim) matrix.
  RowMatrix path_matrix(Index path) const;
  bool exited(Index path) const { return exit_step[path] >= 0; }
  bool alive_at(Index path, int report_index) const {
    return exit_step[path] < 0 ||
           exit_step[path] > static_cast<std::int64_t>(report_index) * report_every;
  }
  double exit_fraction() const;
  Index survivors() const;
};

/// One Euler step seen by an observer: state x at time t, coefficients there,
/// the normal draw xi, and the resulting state.
struct EulerStep {
  int step;
  double t;
  const Point& x;
  const Point& drift;
  const SmallMatrix& sigma;
  const Point& xi;
  const Point& next;
};

/// Runs one Euler-Maruyama path X_{k+1} = X_k + b dt + sigma sqrt(dt) xi_k and
/// calls observer(EulerStep) for every step. Returns the first step index whose
/// state lies outside the box, or -1. Throws ErrorKind::Simulation on a
/// non-finite state.
template <class Observer>
std::int64_t simulate_path(const CoefficientSet& coeffs, Point x, Index path, int steps, double dt,
                           std::uint64_t seed, Observer&& observer) {
  const Grid& g = coeffs.grid();
  const int d = g.dim();
  const double root_dt = std::sqrt(dt);
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Stencil s = locate(g, t, x);
    const Point drift = coeffs.drift(s);
    const SmallMatrix sigma = coeffs.diffusion(s);
    const Point xi = gaussian_increment(seed, static_cast<std::uint32_t>(k),
                                        static_cast<std::uint64_t>(path), d);
    const Point next = x + drift * dt + sigma * (root_dt * xi);
    if (!next.allFinite()) {
      fail(ErrorKind::Simulation, "non-finite state in path " + std::to_string(path) +
                                      " at step " + std::to_string(k));
    }
    observer(EulerStep{k, t, x, drift, sigma, xi, next});
    x = next;
    if (!g.contains(x)) return k + 1;
  }
  return -1;
}

/// Ensemble of n_paths Euler-Maruyama paths. Bit-identical for equal inputs
/// whatever the thread count.
PathEnsemble euler_maruyama(const CoefficientSet& coeffs, const InitialLaw& mu0,
                            const SimulationOptions& options, int level = 0);

/// Coefficients mollified at scale delta0 * 2^{-n}; the identity when that
/// scale is below one grid spacing.
CoefficientSet mollified_sequence(const CoefficientSet& coeffs, int n, double delta0);

/// Binary ensemble dump (little-endian):
///   magic "SSDEENS1", u32 dim, u32 level, u32 report_every, u32 n_times,
///   u64 n_paths, u64 seed, f64 dt, f64 times[n_times],
///   i64 exit_step[n_paths], f64 paths[n_paths][n_times][dim]
void save_ensemble(const PathEnsemble& ens, const std::filesystem::path& path);
PathEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace ssde
