#pragma once

#include <vector>

#include "ssde/field.hpp"
#include "ssde/norms.hpp"

namespace ssde {

/// The unique eps > 0 with (1 + eps)/q + (d + eps)/p = 1, i.e.
/// eps = (1 - 1/q - d/p) / (1/q + 1/p). Either exponent may be infinite.
///
/// Throws ErrorKind::Precondition when 1/q + d/p >= 1 and ErrorKind::Parameter
/// when p = q = inf.
double critical_epsilon(double p, double q, int d);

/// R = norm^{p / (p - d - eps)}, and 0 for a zero norm.
/// Throws ErrorKind::Precondition when p <= d + eps.
double threshold(double slice_norm_p, double p, int d, double epsilon);

struct DecompositionResult {
  double p = 0.0;
  double q = 0.0;
  double epsilon = 0.0;
  bool uniformly_local = false;
  std::vector<double> slice_norms;  // ||f_t||_p (or the uniformly local norm)
  std::vector<double> thresholds;   // R_t
  SpaceTimeField f_le;              // f where |f| <= R_t, signed zero elsewhere
  SpaceTimeField f_gt;              // f where |f| > R_t, signed zero elsewhere

  std::vector<double> gt_slice_norms;  // ||f^>_t|| in L^{d+eps} (uniformly local if requested)
  double certified_gt_norm = 0.0;      // max_t of gt_slice_norms
  double gt_bound = 1.0;               // 1, or the covering constant in uniformly local mode
  double certified_le_norm = 0.0;      // ||f^<=||_{L^{1+eps}_t L^inf_x}
  double le_bound = 0.0;               // ||f||_{L^q_t L^p_x}^{q/(1+eps)}

  double gt_margin() const { return gt_bound - certified_gt_norm; }
  double le_margin() const { return le_bound - certified_le_norm; }
};

/// Number of lattice cutoffs chi^{z'} (pitch cutoff_radius/2) needed so that
/// every point of supp chi^z has some z' within cutoff_radius.
int covering_count(int d);

/// Splits f = f^<= + f^> with thresholds R_t computed from the per-slice norm.
/// The split is a nodal mask on |f| (Euclidean for vector fields), so the sum
/// reproduces f bit for bit.
///
/// p = inf gives (f, 0). q = inf is rejected (ErrorKind::Parameter): such an f
/// already lies in L^inf_t L^{d+eps'}_x with eps' = p - d.
DecompositionResult decompose(const SpaceTimeField& f, double p, double q,
                              bool uniformly_local = false);

}  // namespace ssde
