#include "ssde/norms.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <vector>
#include <cmath>

#include "ssde/error.hpp"

namespace ssde {

Eigen::VectorXd node_weights(const Grid& grid, Quadrature rule) {
  const double h = grid.spacing();
  if (rule == Quadrature::Riemann) {
    return Eigen::VectorXd::Constant(grid.node_count(), grid.cell_volume());
  }
  Eigen::VectorXd w(grid.node_count());
  const int last = grid.points_per_axis() - 1;
  for (Index n = 0; n < grid.node_count(); ++n) {
    const auto idx = grid.multi_index(n);
    double v = 1.0;
    for (int a = 0; a < grid.dim(); ++a) v *= (idx[a] == 0 || idx[a] == last) ? 0.5 * h : h;
    w[n] = v;
  }
  return w;
}

Eigen::VectorXd magnitudes(const SliceRef& slice) { return slice.rowwise().norm(); }

namespace {

void check_exponent(double p) {
  require(p >= 1.0 && !std::isnan(p), ErrorKind::Parameter, "Lebesgue exponent must be >= 1");
}

Eigen::VectorXd checked_magnitudes(const SliceRef& slice) {
  Eigen::VectorXd mag = magnitudes(slice);
  require(!mag.array().isNaN().any(), ErrorKind::Data, "norm of a slice containing NaN");
  return mag;
}

}  // namespace

double lp_space_norm(const Grid& grid, const SliceRef& slice, double p, Quadrature rule) {
  check_exponent(p);
  const Eigen::VectorXd mag = checked_magnitudes(slice);
  return weighted_lp(mag.array(), node_weights(grid, rule).array(), p);
}

double cutoff_profile(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  // Smooth transition built from exp(-1/s): ratio of two flat bumps.
  const double s = r - 1.0;
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

double uniformly_local_norm(const Grid& grid, const SliceRef& slice, double p,
                            double cutoff_radius, Quadrature rule) {
  check_exponent(p);
  require(cutoff_radius > 0.0, ErrorKind::Parameter, "cutoff radius must be positive");
  const Eigen::VectorXd mag = checked_magnitudes(slice);
  const Eigen::VectorXd w = node_weights(grid, rule);
  const int d = grid.dim();
  const int m = grid.points_per_axis();
  const double L = grid.half_width();
  const double h = grid.spacing();
  const double pitch = 0.5 * cutoff_radius;
  const double reach = 2.0 * cutoff_radius;
  const int lattice_half = static_cast<int>(std::floor((L + reach) / pitch));
  const int span = 2 * lattice_half + 1;
  int shifts = 1;
  for (int a = 0; a < d; ++a) shifts *= span;

  double best = 0.0;
  for (int s = 0; s < shifts; ++s) {
    double z[kMaxDim] = {0, 0, 0};
    int lo[kMaxDim] = {0, 0, 0};
    int hi[kMaxDim] = {0, 0, 0};
    int rem = s;
    bool empty = false;
    for (int a = 0; a < d; ++a) {
      z[a] = (rem % span - lattice_half) * pitch;
      rem /= span;
      lo[a] = std::max(0, static_cast<int>(std::ceil((z[a] - reach + L) / h)));
      hi[a] = std::min(m - 1, static_cast<int>(std::floor((z[a] + reach + L) / h)));
      if (lo[a] > hi[a]) empty = true;
    }
    if (empty) continue;
    double acc = 0.0;
    std::array<int, kMaxDim> idx{lo[0], lo[1], lo[2]};
    while (true) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double dx = grid.coordinate(idx[a]) - z[a];
        r2 += dx * dx;
      }
      const double chi = cutoff_profile(std::sqrt(r2) / cutoff_radius);
      if (chi > 0.0) {
        const Index n = grid.node_index(idx);
        const double v = chi * mag[n];
        if (p == kInf) {
          acc = std::max(acc, v);
        } else {
          acc += std::pow(v, p) * w[n];
        }
      }
      int a = 0;
      for (; a < d; ++a) {
        if (++idx[a] <= hi[a]) break;
        idx[a] = lo[a];
      }
      if (a == d) break;
    }
    best = std::max(best, p == kInf ? acc : std::pow(acc, 1.0 / p));
  }
  return best;
}

double slice_norm(const Grid& grid, const SliceRef& slice, const MixedNormSpec& spec) {
  return spec.uniformly_local
             ? uniformly_local_norm(grid, slice, spec.p, spec.cutoff_radius, spec.quadrature)
             : lp_space_norm(grid, slice, spec.p, spec.quadrature);
}

double time_composition(std::span<const double> v, double dt, double q) {
  check_exponent(q);
  require(v.size() >= 2, ErrorKind::Parameter, "time composition needs at least two slices");
  const std::size_t n = v.size() - 1;
  if (q == kInf) return *std::max_element(v.begin(), v.begin() + static_cast<long>(n));
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += std::pow(v[k], q) * dt;
  return std::pow(acc, 1.0 / q);
}

double mixed_norm(const SpaceTimeField& field, const MixedNormSpec& spec) {
  const Grid& g = field.grid();
  std::vector<double> per_slice(static_cast<std::size_t>(g.time_steps()));
  for (int k = 0; k < g.time_steps(); ++k) per_slice[k] = slice_norm(g, field.slice(k), spec);
  return time_composition(per_slice, g.time_step(), spec.q);
}

double linear_growth_envelope(const Grid& grid, const SliceRef& slice) {
  const Eigen::VectorXd mag = checked_magnitudes(slice);
  double best = 0.0;
  for (Index n = 0; n < grid.node_count(); ++n) {
    best = std::max(best, mag[n] / (1.0 + grid.node_position(n).norm()));
  }
  return best;
}

RowMatrix spatial_jacobian(const Grid& grid, const SliceRef& slice) {
  const int d = grid.dim();
  const int m = grid.points_per_axis();
  const Index codim = slice.cols();
  const double inv2h = 0.5 / grid.spacing();
  RowMatrix jac(grid.node_count(), codim * d);
  for (Index n = 0; n < grid.node_count(); ++n) {
    const auto idx = grid.multi_index(n);
    for (int a = 0; a < d; ++a) {
      auto shifted = [&](int delta) {
        auto j = idx;
        j[a] += delta;
        return slice.row(grid.node_index(j));
      };
      Eigen::RowVectorXd deriv;
      if (idx[a] == 0) {
        deriv = (-3.0 * slice.row(n) + 4.0 * shifted(1) - shifted(2)) * inv2h;
      } else if (idx[a] == m - 1) {
        deriv = (3.0 * slice.row(n) - 4.0 * shifted(-1) + shifted(-2)) * inv2h;
      } else {
        deriv = (shifted(1) - shifted(-1)) * inv2h;
      }
      for (Index c = 0; c < codim; ++c) jac(n, c * d + a) = deriv[c];
    }
  }
  return jac;
}

double operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& jac) {
  const Index d = jac.cols();
  if (d == 1 || jac.rows() == 1) return jac.norm();
  if (d == 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(Eigen::Matrix2d(jac.transpose() * jac), Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()[1]));
  }
  require(d == 3, ErrorKind::Parameter, "operator_norm supports at most 3 columns");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(Eigen::Matrix3d(jac.transpose() * jac), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()[2]));
}

namespace {

Eigen::MatrixXd unpack_jacobian(const RowMatrix& jac, Index n, Index codim, int d) {
  Eigen::MatrixXd j(codim, d);
  for (Index c = 0; c < codim; ++c)
    for (int a = 0; a < d; ++a) j(c, a) = jac(n, c * d + a);
  return j;
}

}  // namespace

double c1_space_norm(const Grid& grid, const SliceRef& slice) {
  const Eigen::VectorXd mag = checked_magnitudes(slice);
  const RowMatrix jac = spatial_jacobian(grid, slice);
  double grad_sup = 0.0;
  for (Index n = 0; n < grid.node_count(); ++n) {
    grad_sup = std::max(grad_sup, operator_norm(unpack_jacobian(jac, n, slice.cols(), grid.dim())));
  }
  return mag.maxCoeff() + grad_sup;
}

double c0t_c1x_norm(const SpaceTimeField& field) {
  double best = 0.0;
  for (int k = 0; k < field.grid().time_steps(); ++k) {
    best = std::max(best, c1_space_norm(field.grid(), field.slice(k)));
  }
  return best;
}

double interpolant_lipschitz(const Grid& grid, const SliceRef& slice) {
  const int d = grid.dim();
  const int m = grid.points_per_axis();
  const Index codim = slice.cols();
  const double inv_h = 1.0 / grid.spacing();
  const int corners = 1 << d;
  Index cells = 1;
  for (int a = 0; a < d; ++a) cells *= (m - 1);
  double best = 0.0;
  Eigen::MatrixXd j(codim, d);
  for (Index cell = 0; cell < cells; ++cell) {
    std::array<int, kMaxDim> base{0, 0, 0};
    Index rem = cell;
    for (int a = 0; a < d; ++a) {
      base[a] = static_cast<int>(rem % (m - 1));
      rem /= (m - 1);
    }
    for (int c = 0; c < corners; ++c) {
      for (int a = 0; a < d; ++a) {
        auto lo = base;
        auto hi = base;
        for (int b = 0; b < d; ++b) {
          if (b == a) continue;
          lo[b] += (c >> b) & 1;
          hi[b] += (c >> b) & 1;
        }
        hi[a] += 1;
        j.col(a) = (slice.row(grid.node_index(hi)) - slice.row(grid.node_index(lo))).transpose() *
                   inv_h;
      }
      best = std::max(best, operator_norm(j));
    }
  }
  return best;
}

double holder_seminorm(std::span<const double> times, const SliceRef& path, double gamma) {
  require(times.size() >= 2 && static_cast<Index>(times.size()) == path.rows(),
          ErrorKind::Parameter, "Hoelder seminorm needs a path of at least two points");
  require(gamma > 0.0 && gamma <= 1.0, ErrorKind::Parameter, "Hoelder exponent must lie in (0,1]");
  double best = 0.0;
  const Index n = path.rows();
  for (Index s = 0; s < n; ++s) {
    for (Index t = s + 1; t < n; ++t) {
      const double dt = std::abs(times[t] - times[s]);
      const double inc = (path.row(t) - path.row(s)).norm();
      best = std::max(best, inc / std::pow(dt, gamma));
    }
  }
  return best;
}

double holder_norm(std::span<const double> times, const SliceRef& path, double gamma) {
  return path.rowwise().norm().maxCoeff() + holder_seminorm(times, path, gamma);
}

double time_holder_constant(const SpaceTimeField& field, double gamma) {
  const Grid& g = field.grid();
  double best = 0.0;
  for (int s = 0; s < g.time_steps(); ++s) {
    for (int t = s + 1; t < g.time_steps(); ++t) {
      const double diff = (field.slice(t) - field.slice(s)).rowwise().norm().maxCoeff();
      best = std::max(best, diff / std::pow(g.time(t) - g.time(s), gamma));
    }
  }
  return best;
}

}  // namespace ssde
