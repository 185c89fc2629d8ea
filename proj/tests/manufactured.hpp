#pragma once

// Exact solution u = (T - t) prod_i sin(k (x_i + L)), k = pi / (2L), of the
// backward equation d_t u + 1/2 a:D^2 u + g.grad u - lambda u + f = 0 with
// zero boundary data, and the source f that produces it.

#include <cmath>
#include <numbers>

#include "ssde/coefficients.hpp"

namespace manufactured {

using ssde::Point;
using ssde::SmallMatrix;
using ssde::Value;

struct Problem {
  ssde::SpaceTimeField a, g, f, exact;
};

inline SmallMatrix diffusion_matrix(int d) {
  SmallMatrix a = SmallMatrix::Identity(d, d);
  if (d >= 2) {
    a(0, 0) = 1.2;
    a(1, 1) = 0.8;
    a(0, 1) = a(1, 0) = 0.3;
  }
  return a;
}

inline Point drift(const Point& x) {
  Point g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = (i % 2 == 0 ? 0.5 : -0.3) * std::cos(x[i]);
  return g;
}

inline Problem build(const ssde::Grid& grid, double lambda) {
  const int d = grid.dim();
  const double L = grid.half_width();
  const double T = grid.time_horizon();
  const double k = std::numbers::pi / (2.0 * L);
  const SmallMatrix a = diffusion_matrix(d);

  auto parts = [=](const Point& x, double& s, Point& grad, SmallMatrix& hess) {
    Point sn(d), cs(d);
    for (int i = 0; i < d; ++i) {
      sn[i] = std::sin(k * (x[i] + L));
      cs[i] = std::cos(k * (x[i] + L));
    }
    s = sn.prod();
    grad = Point::Zero(d);
    hess = SmallMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      double gi = k * cs[i];
      for (int j = 0; j < d; ++j)
        if (j != i) gi *= sn[j];
      grad[i] = gi;
      hess(i, i) = -k * k * s;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        double h = k * k * cs[i] * cs[j];
        for (int m = 0; m < d; ++m)
          if (m != i && m != j) h *= sn[m];
        hess(i, j) = h;
      }
    }
  };

  Problem p{ssde::SpaceTimeField::constant(grid, ssde::flatten(a)),
            ssde::SpaceTimeField::from_function(grid, d, [](double, const Point& x) { return Value(drift(x)); }),
            ssde::SpaceTimeField::from_function(grid, 1,
                                                [=](double t, const Point& x) {
                                                  double s;
                                                  Point grad;
                                                  SmallMatrix hess;
                                                  parts(x, s, grad, hess);
                                                  const double gen = 0.5 * (a.cwiseProduct(hess)).sum() +
                                                                     drift(x).dot(grad) - lambda * s;
                                                  Value v(1);
                                                  v[0] = s - (T - t) * gen;
                                                  return v;
                                                }),
            ssde::SpaceTimeField::from_function(grid, 1, [=](double t, const Point& x) {
              double s;
              Point grad;
              SmallMatrix hess;
              parts(x, s, grad, hess);
              Value v(1);
              v[0] = (T - t) * s;
              return v;
            })};
  return p;
}

}  // namespace manufactured
