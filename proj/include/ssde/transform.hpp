#pragma once

#include <vector>

#include "ssde/coefficients.hpp"
#include "ssde/zvonkin.hpp"

namespace ssde {

/// Drift lambda*u + DPhi b1 and diffusion DPhi sigma of Y = Phi(X), evaluated at
/// x = Phi^{-1}(y). DPhi multiplies from the left, as Ito's formula requires.
struct TransformedPoint {
  Point b_tilde;
  SmallMatrix sigma_tilde;
};
TransformedPoint transformed_at(const CoefficientSet& coeffs, const ZvonkinSolution& sol,
                                double t, const Point& y);

struct TransformedCoefficients {
  SpaceTimeField b_tilde;      // codim d, sampled at grid nodes y
  SpaceTimeField sigma_tilde;  // codim d*d
  std::vector<double> h;       // h_t = lambda_bar + 4 * envelope(b1_t)
  std::vector<double> envelope_b_tilde;  // recomputed nodewise over valid nodes
  std::vector<double> envelope_margin;   // h_t - envelope_b_tilde
  double sigma_sup = 0.0;                // sup of the spectral norm of sigma
  double sigma_tilde_sup = 0.0;
  double h_l1 = 0.0;
  double h_l1e = 0.0;          // ||h||_{L^{1+eps}}
  Index excluded_nodes = 0;    // nodes where Phi^{-1} left the box; kept at the original values
  bool certificate_ok = false;
};

/// Nodewise transformed coefficients and the linear-growth certificate
/// envelope(b_tilde_t) <= h_t, sup|sigma_tilde| <= 2 sup|sigma|.
TransformedCoefficients transformed_coefficients(const CoefficientSet& coeffs,
                                                 const ZvonkinSolution& sol, double epsilon);

struct GrowthEnvelope {
  std::vector<double> h;
  double l1 = 0.0;
  double l1e = 0.0;
};
/// h_t = lambda_bar + 4 max_x |b1_t(x)|/(1+|x|) with its L^1 and L^{1+eps} norms
/// (left-endpoint quadrature).
GrowthEnvelope growth_envelope_h(const CoefficientSet& coeffs, double lambda_bar, double epsilon);

/// e^{h_l1} (y0_abs + z_sup).
double gronwall_bound(double y0_abs, double z_sup, double h_l1);

struct PathBoundConstants {
  double lambda_bar = 0.0;
  double h_l1 = 0.0;
  double h_l1e = 0.0;
  double c_half_t_norm = 0.0;
  double time_horizon = 1.0;
  double epsilon = 1.0;
  double min_time_gap = 0.0;  // shortest time separation, needed when eps/(1+eps) > 1/2
};

/// Explicit ceiling for sup|X| + [X]_{eps/(1+eps)} from |X_0| and the Hoelder
/// norm of Z = int sigma_tilde dW:
///   A = e^{h_l1}(1 + |X_0| + 1/2 + ||Z||) - 1      (bound on sup|Y|)
///   [Y] <= (1 + A) h_l1e + [Z]
///   bound = A + 1/2 + 2 [Y] + 2 c_half tau,  tau = sup |t-s|^{1/2 - gamma}.
double x_path_bound(double x0_abs, double z_holder_norm, const PathBoundConstants& c);

}  // namespace ssde
