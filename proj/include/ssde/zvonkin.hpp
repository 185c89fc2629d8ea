#pragma once

#include <cstdint>
#include <vector>

#include "ssde/field.hpp"

namespace ssde {

struct PdeOptions {
  double residual_tolerance = 1e-10;  // max-norm residual, relative to max(1, |rhs|)
  int max_iterations = 4000;          // per iterative solve (d >= 2)
};

struct LambdaStep {
  double lambda;
  double c0c1_norm;
};

/// Solution u of  d_t u + 1/2 a:D^2 u + g.grad u - lambda u + f = 0,  u(T) = 0,
/// on the grid box with zero Dirichlet data, together with its certificates.
struct ZvonkinSolution {
  SpaceTimeField u;
  SpaceTimeField grad_u;  // codim m*d, column c*d + i holds d u_c / d x_i
  double lambda_bar = 0.0;
  double c0c1_norm = 0.0;       // max(sup|u| + sup|Du| centered, sup|u| + interpolant Lipschitz)
  double c_half_t_norm = 0.0;   // time Hoelder-1/2 constant of u on the grid
  double residual_linf = 0.0;   // worst discrete residual over all solves
  int max_solver_iterations = 0;
  std::vector<LambdaStep> lambda_history;  // filled by calibrate_lambda
};

/// Backward implicit Euler with coefficients frozen at the new time level:
/// (I/dt - A_j + lambda) u_j = u_{j+1}/dt + f_j. Diffusion uses the standard
/// 3-point second difference plus a 4-point cross stencil, advection is centered where
/// |g_i| h <= a_ii and upwind elsewhere.
/// Each component of f is solved separately.
///
/// a is sigma sigma^T flattened (codim d*d); g has codim d; f any codim.
/// Throws ErrorKind::Ellipticity when a is not positive definite at a node and
/// ErrorKind::Solver when the residual tolerance is not reached.
ZvonkinSolution solve_backward_pde(const SpaceTimeField& a, const SpaceTimeField& g,
                                   const SpaceTimeField& f, double lambda,
                                   const PdeOptions& options = {});

/// Solves with f = g = b2 for lambda = lambda0 * 2^k, k = 0..max_doublings,
/// returning the first solution with c0c1_norm <= 1/2.
/// Throws CalibrationError carrying the last achieved norm otherwise.
ZvonkinSolution calibrate_lambda(const SpaceTimeField& a, const SpaceTimeField& b2,
                                 double lambda0 = 1.0, int max_doublings = 20,
                                 const PdeOptions& options = {});

/// x + u_t(x).
Point phi(const ZvonkinSolution& sol, double t, const Point& x);
/// I + Du_t(x) from the interpolated nodal gradient.
SmallMatrix phi_jacobian(const ZvonkinSolution& sol, double t, const Point& x);

struct InverseResult {
  Point x;
  int iterations = 0;
};

/// Fixed point x <- y - u_t(x) started at y, stopped when the step is below tol.
/// Throws ErrorKind::Domain when an iterate leaves the box and ErrorKind::Solver
/// when max_iterations is reached.
InverseResult phi_inverse(const ZvonkinSolution& sol, double t, const Point& y,
                          double tol = 1e-10, int max_iterations = 200);

struct PairWitness {
  double ratio = 1.0;
  double t = 0.0;
  Point x;
  Point y;
};

struct TransformPropertyReport {
  Index pairs = 0;
  double tolerance = 0.0;
  double phi_min_ratio = 1.0, phi_max_ratio = 1.0;
  double inverse_min_ratio = 1.0, inverse_max_ratio = 1.0;
  Index phi_violations = 0;
  Index inverse_violations = 0;
  Index inverse_failures = 0;  // pairs where phi_inverse did not converge or left the box
  PairWitness phi_worst;       // ratio farthest outside [1/2, 2]
  PairWitness inverse_worst;
  double phi_time_constant = 0.0;      // max |Phi_t(x) - Phi_s(x)| / |t - s|^{1/2}
  double inverse_time_constant = 0.0;  // same for the inverse
  double c_half_t_norm = 0.0;
  Index time_violations = 0;
  double max_roundtrip_error = 0.0;
  int max_inverse_iterations = 0;
  bool passed = false;
};

/// Samples point pairs (log-uniform separations) in the box shrunk by one unit
/// and checks 1/2 |x-y| <= |Phi_t(x) - Phi_t(y)| <= 2 |x-y| for Phi and its
/// inverse, the time-1/2 increments against c_half_t_norm (twice it for the
/// inverse), and the round trip Phi(Phi^{-1}(y)) = y.
TransformPropertyReport verify_transform_properties(const ZvonkinSolution& sol, Index pairs,
                                                    std::uint64_t seed = 7,
                                                    double tolerance = 0.02);

}  // namespace ssde
