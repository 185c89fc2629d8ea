#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "ssde/field.hpp"

namespace ssde {

using SliceRef = Eigen::Ref<const RowMatrix>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Spatial quadrature: nodal Riemann sums (h^d per node) or the tensor trapezoid rule.
enum class Quadrature { Riemann, Trapezoid };

Eigen::VectorXd node_weights(const Grid& grid, Quadrature rule = Quadrature::Riemann);

/// Euclidean length of each row.
Eigen::VectorXd magnitudes(const SliceRef& slice);

/// Weighted l^p norm of nonnegative nodal magnitudes; p = inf gives the max.
template <class Derived, class WeightDerived>
double weighted_lp(const Eigen::ArrayBase<Derived>& mag, const Eigen::ArrayBase<WeightDerived>& w,
                   double p) {
  if (p == kInf) return mag.size() == 0 ? 0.0 : mag.maxCoeff();
  if (p == 1.0) return (mag * w).sum();
  if (p == 2.0) return std::sqrt((mag.square() * w).sum());
  return std::pow((mag.pow(p) * w).sum(), 1.0 / p);
}

/// (sum_nodes |f|^p h^d)^{1/p}; max over nodes for p = inf.
/// Throws ErrorKind::Data on NaN input and ErrorKind::Parameter for p < 1.
double lp_space_norm(const Grid& grid, const SliceRef& slice, double p,
                     Quadrature rule = Quadrature::Riemann);

/// Fixed smooth cutoff: 1 on r <= 1, 0 on r >= 2, C-infinity in between.
double cutoff_profile(double r);

struct MixedNormSpec {
  double q = 2.0;  // time exponent, may be kInf
  double p = 2.0;  // space exponent, may be kInf
  bool uniformly_local = false;
  double cutoff_radius = 1.0;  // chi^z(x) = cutoff_profile(|x - z| / cutoff_radius)
  Quadrature quadrature = Quadrature::Riemann;
};

/// max over shifts z on a lattice of pitch cutoff_radius/2 of ||chi^z f||_{L^p}.
double uniformly_local_norm(const Grid& grid, const SliceRef& slice, double p,
                            double cutoff_radius = 1.0, Quadrature rule = Quadrature::Riemann);

/// Per-slice spatial norm selected by spec (plain or uniformly local).
double slice_norm(const Grid& grid, const SliceRef& slice, const MixedNormSpec& spec);

/// Left-endpoint L^q composition of per-slice values sampled on a uniform time
/// grid: (sum_{k < K-1} v_k^q dt)^{1/q}; q = inf is the max over k < K-1.
double time_composition(std::span<const double> slice_values, double dt, double q);

double mixed_norm(const SpaceTimeField& field, const MixedNormSpec& spec);

/// max over nodes of |f(x)| / (1 + |x|).
double linear_growth_envelope(const Grid& grid, const SliceRef& slice);

/// Nodal Jacobian by centered differences (second-order one-sided at the box
/// faces). Row n holds d f_c / d x_i at column c * dim + i.
RowMatrix spatial_jacobian(const Grid& grid, const SliceRef& slice);

/// Spectral norm of an m x d matrix with d <= 3.
double operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& jac);

/// sup |f| + sup |grad f| with the spectral norm on the Jacobian.
double c1_space_norm(const Grid& grid, const SliceRef& slice);
/// Max over all time slices of c1_space_norm.
double c0t_c1x_norm(const SpaceTimeField& field);

/// Exact Lipschitz constant (Euclidean) of the multilinear interpolant of a
/// slice: the largest spectral norm among cell-corner Jacobians.
double interpolant_lipschitz(const Grid& grid, const SliceRef& slice);

/// max over pairs s != t of |x_t - x_s| / |t - s|^gamma; rows of path are times.
double holder_seminorm(std::span<const double> times, const SliceRef& path, double gamma);
/// sup_t |x_t| + holder_seminorm.
double holder_norm(std::span<const double> times, const SliceRef& path, double gamma);

/// sup over nodes and time-slice pairs of |f_t(x) - f_s(x)| / |t - s|^gamma.
double time_holder_constant(const SpaceTimeField& field, double gamma);

}  // namespace ssde
