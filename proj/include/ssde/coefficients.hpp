#pragma once

#include <string>

#include "ssde/field.hpp"

namespace ssde {

/// Drift split b = b1 + b2 and diffusion matrix sigma (d x d, row-major), all on one grid.
struct CoefficientSet {
  SpaceTimeField b1;     // tame part: linear growth, integrable in time
  SpaceTimeField b2;     // singular part
  SpaceTimeField sigma;  // codim d*d
  double ellipticity_K = 1.0;
  std::string modulus_descriptor;  // metadata only, e.g. "lipschitz:0.25"

  const Grid& grid() const { return b1.grid(); }
  int dim() const { return b1.grid().dim(); }

  /// b1 + b2 at a located point.
  Point drift(const Stencil& s) const;
  SmallMatrix diffusion(const Stencil& s) const;
};

/// Throws ErrorKind::Parameter unless the three fields share a grid and shapes match.
void check_shapes(const CoefficientSet& coeffs);

/// View a flattened row-major d x d value as a matrix.
SmallMatrix as_matrix(const Value& flat, int dim);
Value flatten(const SmallMatrix& m);

struct EllipticityReport {
  bool ok = true;
  double min_singular_sq = 0.0;  // min over nodes of sigma_min(sigma)^2
  double max_singular_sq = 0.0;  // max over nodes of sigma_max(sigma)^2
  int worst_time_index = -1;     // first offending (time, node), or -1
  Index worst_node = -1;
};

/// Checks K^{-1}|xi|^2 <= |sigma^T xi|^2 <= K|xi|^2 at every node through the
/// extreme singular values, which covers every probe direction at once.
EllipticityReport check_ellipticity(const SpaceTimeField& sigma, double K);
/// Throws ErrorKind::Ellipticity naming the first offending node.
void require_elliptic(const SpaceTimeField& sigma, double K);

/// a = sigma sigma^T, flattened row-major.
SpaceTimeField diffusion_tensor(const SpaceTimeField& sigma);

}  // namespace ssde
