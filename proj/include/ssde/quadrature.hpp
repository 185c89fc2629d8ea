#pragma once

#include <functional>

#include "ssde/types.hpp"

namespace ssde {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// Tensor composite Gauss-Legendre integral of fn over the box [lo, hi]
/// (per-axis bounds), with `panels` panels of `order` points per axis.
double integrate_box(const Point& lo, const Point& hi,
                     const std::function<double(const Point&)>& fn, int panels = 16,
                     int order = 6);

}  // namespace ssde
