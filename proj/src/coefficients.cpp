#include "ssde/coefficients.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

#include "ssde/error.hpp"

namespace ssde {

Point CoefficientSet::drift(const Stencil& s) const {
  return (b1.evaluate(s) + b2.evaluate(s)).head(dim());
}

SmallMatrix CoefficientSet::diffusion(const Stencil& s) const {
  return as_matrix(sigma.evaluate(s), dim());
}

void check_shapes(const CoefficientSet& c) {
  const int d = c.b1.grid().dim();
  require(c.b1.grid() == c.b2.grid() && c.b1.grid() == c.sigma.grid(), ErrorKind::Parameter,
          "coefficient fields must share one grid");
  require(c.b1.codim() == d && c.b2.codim() == d, ErrorKind::Parameter,
          "drift fields must have codim d");
  require(c.sigma.codim() == d * d, ErrorKind::Parameter, "sigma must have codim d*d");
  require(c.ellipticity_K > 0, ErrorKind::Parameter, "ellipticity constant must be positive");
}

SmallMatrix as_matrix(const Value& flat, int dim) {
  SmallMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = flat[i * dim + j];
  return m;
}

Value flatten(const SmallMatrix& m) {
  Value v(m.rows() * m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

namespace {

// Extreme eigenvalues of sigma sigma^T via the closed-form small solver.
std::pair<double, double> singular_sq_range(const SmallMatrix& s) {
  const int d = static_cast<int>(s.rows());
  if (d == 1) return {s(0, 0) * s(0, 0), s(0, 0) * s(0, 0)};
  if (d == 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(Eigen::Matrix2d(s * s.transpose()), Eigen::EigenvaluesOnly);
    return {es.eigenvalues()[0], es.eigenvalues()[1]};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(Eigen::Matrix3d(s * s.transpose()), Eigen::EigenvaluesOnly);
  return {es.eigenvalues()[0], es.eigenvalues()[2]};
}

}  // namespace

EllipticityReport check_ellipticity(const SpaceTimeField& sigma, double K) {
  const Grid& g = sigma.grid();
  const int d = g.dim();
  require(sigma.codim() == d * d, ErrorKind::Parameter, "sigma must have codim d*d");
  EllipticityReport rep;
  rep.min_singular_sq = std::numeric_limits<double>::infinity();
  rep.max_singular_sq = 0.0;
  const double lo = 1.0 / K;
  const double tol = 1e-12;
  for (int k = 0; k < g.time_steps(); ++k) {
    for (Index n = 0; n < g.node_count(); ++n) {
      const auto [smin, smax] = singular_sq_range(as_matrix(sigma.at(k, n), d));
      rep.min_singular_sq = std::min(rep.min_singular_sq, smin);
      rep.max_singular_sq = std::max(rep.max_singular_sq, smax);
      if (rep.ok && (smin < lo * (1.0 - tol) || smax > K * (1.0 + tol))) {
        rep.ok = false;
        rep.worst_time_index = k;
        rep.worst_node = n;
      }
    }
  }
  return rep;
}

void require_elliptic(const SpaceTimeField& sigma, double K) {
  const EllipticityReport rep = check_ellipticity(sigma, K);
  if (rep.ok) return;
  const Point x = sigma.grid().node_position(rep.worst_node);
  const auto [smin, smax] = singular_sq_range(
      as_matrix(sigma.at(rep.worst_time_index, rep.worst_node), sigma.grid().dim()));
  std::ostringstream msg;
  msg << "ellipticity violated at time index " << rep.worst_time_index << ", node "
      << rep.worst_node << " (x = " << x.transpose() << "): squared singular values in [" << smin
      << ", " << smax << "], required [" << 1.0 / K << ", " << K << "]";
  fail(ErrorKind::Ellipticity, msg.str());
}

SpaceTimeField diffusion_tensor(const SpaceTimeField& sigma) {
  const Grid& g = sigma.grid();
  const int d = g.dim();
  require(sigma.codim() == d * d, ErrorKind::Parameter, "sigma must have codim d*d");
  RowMatrix out(sigma.values().rows(), d * d);
  for (Index r = 0; r < out.rows(); ++r) {
    const SmallMatrix s = as_matrix(sigma.values().row(r).transpose(), d);
    out.row(r) = flatten(s * s.transpose()).transpose();
  }
  return SpaceTimeField(g, d * d, std::move(out));
}

}  // namespace ssde
