#include "ssde/zvonkin.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "ssde/coefficients.hpp"
#include "ssde/error.hpp"
#include "ssde/norms.hpp"
#include "ssde/parallel.hpp"
#include "ssde/rng.hpp"

namespace ssde {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void require_positive_definite(const SpaceTimeField& a) {
  const Grid& g = a.grid();
  const int d = g.dim();
  for (int k = 0; k < g.time_steps(); ++k) {
    if (k > 0 && a.slice(k) == a.slice(k - 1)) continue;
    for (Index n = 0; n < g.node_count(); ++n) {
      const SmallMatrix m = as_matrix(a.at(k, n), d);
      double lo = 0.0;
      if (d == 1) {
        lo = m(0, 0);
      } else if (d == 2) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
        es.computeDirect(Eigen::Matrix2d(m), Eigen::EigenvaluesOnly);
        lo = es.eigenvalues()[0];
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
        es.computeDirect(Eigen::Matrix3d(m), Eigen::EigenvaluesOnly);
        lo = es.eigenvalues()[0];
      }
      if (!(lo > 0.0)) {
        fail(ErrorKind::Ellipticity, "diffusion matrix is not positive definite at time index " +
                                         std::to_string(k) + ", node " + std::to_string(n));
      }
    }
  }
}

// Interior unknowns of the Dirichlet problem and their node numbers.
struct InteriorMap {
  std::vector<Index> node_of;    // unknown -> node
  std::vector<Index> unknown_of;  // node -> unknown, -1 on the boundary
};

InteriorMap interior_map(const Grid& g) {
  InteriorMap map;
  map.unknown_of.assign(g.node_count(), -1);
  const int m = g.points_per_axis();
  for (Index n = 0; n < g.node_count(); ++n) {
    const auto idx = g.multi_index(n);
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) inside = inside && idx[a] > 0 && idx[a] < m - 1;
    if (inside) {
      map.unknown_of[n] = static_cast<Index>(map.node_of.size());
      map.node_of.push_back(n);
    }
  }
  return map;
}

SparseMatrix assemble(const Grid& g, const InteriorMap& map, const SpaceTimeField& a,
                      const SpaceTimeField& drift, int k, double lambda) {
  const int d = g.dim();
  const double h = g.spacing();
  const double ih2 = 1.0 / (h * h);
  const double ih = 1.0 / h;
  const Index n_unknowns = static_cast<Index>(map.node_of.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n_unknowns) * (1 + 2 * d + 2 * d * (d - 1)));
  for (Index row = 0; row < n_unknowns; ++row) {
    const Index node = map.node_of[row];
    const auto idx = g.multi_index(node);
    const SmallMatrix A = as_matrix(a.at(k, node), d);
    const Value gv = drift.at(k, node);
    double diag = 1.0 / g.time_step() + lambda;
    auto add = [&](std::array<int, kMaxDim> j, double w) {
      const Index col = map.unknown_of[g.node_index(j)];
      if (col >= 0) entries.emplace_back(row, col, w);
    };
    for (int i = 0; i < d; ++i) {
      const double diff = 0.5 * A(i, i) * ih2;
      double plus = diff;
      double minus = diff;
      diag += 2.0 * diff;
      if (std::abs(gv[i]) * h <= A(i, i)) {
        // centered while the stencil stays monotone
        plus += 0.5 * gv[i] * ih;
        minus -= 0.5 * gv[i] * ih;
      } else if (gv[i] > 0.0) {
        plus += gv[i] * ih;
        diag += gv[i] * ih;
      } else {
        minus -= gv[i] * ih;
        diag -= gv[i] * ih;
      }
      auto jp = idx;
      auto jm = idx;
      ++jp[i];
      --jm[i];
      add(jp, -plus);
      add(jm, -minus);
      for (int l = i + 1; l < d; ++l) {
        const double cross = A(i, l) * 0.25 * ih2;
        if (cross == 0.0) continue;
        for (int si : {-1, 1}) {
          for (int sl : {-1, 1}) {
            auto j = idx;
            j[i] += si;
            j[l] += sl;
            add(j, -cross * si * sl);
          }
        }
      }
    }
    entries.emplace_back(row, row, diag);
  }
  SparseMatrix M(n_unknowns, n_unknowns);
  M.setFromTriplets(entries.begin(), entries.end());
  M.makeCompressed();
  return M;
}

// One time level's operator with whichever solver suits the dimension.
class LevelSolver {
 public:
  LevelSolver(SparseMatrix matrix, int dim, const PdeOptions& options)
      : matrix_(std::move(matrix)), options_(options) {
    if (dim == 1) {
      lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      lu_->compute(Eigen::SparseMatrix<double>(matrix_));
      require(lu_->info() == Eigen::Success, ErrorKind::Solver, "sparse LU factorization failed");
    } else {
      iterative_ = std::make_unique<Solver>();
      iterative_->setTolerance(1e-13);
      iterative_->setMaxIterations(options.max_iterations);
      iterative_->compute(matrix_);
    }
  }

  // Returns the max-norm residual; throws when the tolerance is missed.
  double solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x, int& iterations) {
    const double target = options_.residual_tolerance * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    double residual = 0.0;
    if (lu_) {
      x = lu_->solve(rhs);
      residual = (matrix_ * x - rhs).lpNorm<Eigen::Infinity>();
      if (residual > target) {
        // One step of iterative refinement.
        x += lu_->solve(Eigen::VectorXd(rhs - matrix_ * x));
        residual = (matrix_ * x - rhs).lpNorm<Eigen::Infinity>();
      }
    } else {
      for (int attempt = 0; attempt < 4; ++attempt) {
        x = iterative_->solveWithGuess(rhs, x);
        iterations = std::max(iterations, static_cast<int>(iterative_->iterations()));
        residual = (matrix_ * x - rhs).lpNorm<Eigen::Infinity>();
        if (residual <= target) break;
      }
    }
    require(std::isfinite(residual) && residual <= target, ErrorKind::Solver,
            "linear solve missed the residual tolerance (residual " + std::to_string(residual) +
                ")");
    return residual;
  }

 private:
  using Solver = Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>>;
  SparseMatrix matrix_;
  PdeOptions options_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  std::unique_ptr<Solver> iterative_;
};

double slice_c0c1(const Grid& g, const SliceRef& slice) {
  const double sup = magnitudes(slice).maxCoeff();
  return std::max(c1_space_norm(g, slice), sup + interpolant_lipschitz(g, slice));
}

}  // namespace

ZvonkinSolution solve_backward_pde(const SpaceTimeField& a, const SpaceTimeField& g,
                                   const SpaceTimeField& f, double lambda,
                                   const PdeOptions& options) {
  const Grid& grid = f.grid();
  const int d = grid.dim();
  require(a.grid() == grid && g.grid() == grid, ErrorKind::Parameter,
          "PDE coefficients and source must share one grid");
  require(a.codim() == d * d && g.codim() == d, ErrorKind::Parameter,
          "PDE coefficient shapes do not match the dimension");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::Parameter, "lambda must be >= 0");
  require_positive_definite(a);

  const InteriorMap map = interior_map(grid);
  const Index N = grid.node_count();
  const int K = grid.time_steps();
  const int m = f.codim();
  const double inv_dt = 1.0 / grid.time_step();

  // Operators for each time level, shared when coefficients repeat.
  std::vector<std::shared_ptr<LevelSolver>> levels(K);
  for (int k = K - 2; k >= 0; --k) {
    if (k < K - 2 && a.slice(k) == a.slice(k + 1) && g.slice(k) == g.slice(k + 1)) {
      levels[k] = levels[k + 1];
    } else {
      levels[k] = std::make_shared<LevelSolver>(assemble(grid, map, a, g, k, lambda), d, options);
    }
  }

  RowMatrix u = RowMatrix::Zero(static_cast<Index>(K) * N, m);
  const Index n_unknowns = static_cast<Index>(map.node_of.size());
  std::vector<double> residuals(m, 0.0);
  std::vector<int> iterations(m, 0);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      Eigen::VectorXd next = Eigen::VectorXd::Zero(n_unknowns);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n_unknowns);
      Eigen::VectorXd rhs(n_unknowns);
      for (int k = K - 2; k >= 0; --k) {
        for (Index r = 0; r < n_unknowns; ++r) {
          rhs[r] = next[r] * inv_dt + f.values()(static_cast<Index>(k) * N + map.node_of[r], c);
        }
        x = next;
        residuals[c] = std::max(residuals[c], levels[k]->solve(rhs, x, iterations[c]));
        for (Index r = 0; r < n_unknowns; ++r) u(static_cast<Index>(k) * N + map.node_of[r], c) = x[r];
        next = x;
      }
    }
  });

  SpaceTimeField u_field(grid, m, std::move(u));
  RowMatrix grad(static_cast<Index>(K) * N, m * d);
  double c0c1 = 0.0;
  for (int k = 0; k < K; ++k) {
    grad.middleRows(static_cast<Index>(k) * N, N) = spatial_jacobian(grid, u_field.slice(k));
    c0c1 = std::max(c0c1, slice_c0c1(grid, u_field.slice(k)));
  }
  ZvonkinSolution sol{.u = u_field,
                      .grad_u = SpaceTimeField(grid, m * d, std::move(grad)),
                      .lambda_bar = lambda,
                      .c0c1_norm = c0c1,
                      .c_half_t_norm = time_holder_constant(u_field, 0.5),
                      .residual_linf = *std::max_element(residuals.begin(), residuals.end()),
                      .max_solver_iterations = *std::max_element(iterations.begin(), iterations.end())};
  return sol;
}

ZvonkinSolution calibrate_lambda(const SpaceTimeField& a, const SpaceTimeField& b2, double lambda0,
                                 int max_doublings, const PdeOptions& options) {
  require(lambda0 > 0.0, ErrorKind::Parameter, "lambda0 must be positive");
  std::vector<LambdaStep> history;
  double lambda = lambda0;
  for (int k = 0; k <= max_doublings; ++k, lambda *= 2.0) {
    ZvonkinSolution sol = solve_backward_pde(a, b2, b2, lambda, options);
    history.push_back({lambda, sol.c0c1_norm});
    if (sol.c0c1_norm <= 0.5) {
      sol.lambda_history = std::move(history);
      return sol;
    }
  }
  const LambdaStep last = history.back();
  throw CalibrationError("lambda calibration reached " + std::to_string(max_doublings) +
                             " doublings with C0C1 norm " + std::to_string(last.c0c1_norm),
                         last.c0c1_norm, last.lambda);
}

Point phi(const ZvonkinSolution& sol, double t, const Point& x) {
  require(sol.u.codim() == x.size(), ErrorKind::Parameter, "Phi needs a vector-valued u");
  return x + sol.u.evaluate(t, x);
}

SmallMatrix phi_jacobian(const ZvonkinSolution& sol, double t, const Point& x) {
  const int d = static_cast<int>(x.size());
  return SmallMatrix::Identity(d, d) + as_matrix(sol.grad_u.evaluate(t, x), d);
}

InverseResult phi_inverse(const ZvonkinSolution& sol, double t, const Point& y, double tol,
                          int max_iterations) {
  const Grid& g = sol.u.grid();
  InverseResult r{.x = y};
  for (r.iterations = 1; r.iterations <= max_iterations; ++r.iterations) {
    if (!g.contains(r.x)) fail(ErrorKind::Domain, "inverse transform iterate left the box");
    const Point next = y - sol.u.evaluate(t, r.x);
    const double step = (next - r.x).norm();
    r.x = next;
    if (step <= tol) {
      if (!g.contains(r.x)) fail(ErrorKind::Domain, "inverse transform iterate left the box");
      return r;
    }
  }
  fail(ErrorKind::Solver, "inverse transform did not converge");
}

namespace {

double badness(double ratio) { return std::max(0.5 - ratio, ratio - 2.0); }

}  // namespace

TransformPropertyReport verify_transform_properties(const ZvonkinSolution& sol, Index pairs,
                                                    std::uint64_t seed, double tolerance) {
  const Grid& g = sol.u.grid();
  const int d = g.dim();
  const double L = g.half_width();
  const double inner = L > 2.0 ? L - 1.0 : 0.5 * L;
  const double log_lo = std::log(1e-3 * L);
  const double log_hi = std::log(L);
  TransformPropertyReport rep;
  rep.pairs = pairs;
  rep.tolerance = tolerance;
  rep.c_half_t_norm = sol.c_half_t_norm;
  double phi_bad = -kInf;
  double inv_bad = -kInf;
  PhiloxStream rng(seed, 0);
  auto uniform_in = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

  for (Index s = 0; s < pairs; ++s) {
    Point x(d), y(d), dir(d);
    while (true) {
      for (int a = 0; a < d; ++a) x[a] = uniform_in(-inner, inner);
      for (int a = 0; a < d; ++a) dir[a] = rng.normal();
      const double r = std::exp(uniform_in(log_lo, log_hi));
      y = x + r * dir.normalized();
      if (y.cwiseAbs().maxCoeff() <= inner) break;
    }
    const int k = std::min(g.time_steps() - 1, static_cast<int>(rng.uniform() * g.time_steps()));
    int k2 = std::min(g.time_steps() - 1, static_cast<int>(rng.uniform() * g.time_steps()));
    if (k2 == k) k2 = (k + 1) % g.time_steps();
    const double t = g.time(k);
    const double t2 = g.time(k2);
    const double dist = (x - y).norm();

    const double ratio = (phi(sol, t, x) - phi(sol, t, y)).norm() / dist;
    rep.phi_min_ratio = std::min(rep.phi_min_ratio, ratio);
    rep.phi_max_ratio = std::max(rep.phi_max_ratio, ratio);
    if (ratio < 0.5 - tolerance || ratio > 2.0 + tolerance) ++rep.phi_violations;
    if (badness(ratio) > phi_bad) {
      phi_bad = badness(ratio);
      rep.phi_worst = {ratio, t, x, y};
    }
    const double root_gap = std::sqrt(std::abs(t2 - t));
    const double phi_time = (phi(sol, t2, x) - phi(sol, t, x)).norm() / root_gap;
    rep.phi_time_constant = std::max(rep.phi_time_constant, phi_time);
    if (phi_time > sol.c_half_t_norm * (1.0 + 1e-9) + 1e-12) ++rep.time_violations;

    try {
      const InverseResult ix = phi_inverse(sol, t, x);
      const InverseResult iy = phi_inverse(sol, t, y);
      const InverseResult ix2 = phi_inverse(sol, t2, x);
      rep.max_inverse_iterations =
          std::max({rep.max_inverse_iterations, ix.iterations, iy.iterations, ix2.iterations});
      const double inv_ratio = (ix.x - iy.x).norm() / dist;
      rep.inverse_min_ratio = std::min(rep.inverse_min_ratio, inv_ratio);
      rep.inverse_max_ratio = std::max(rep.inverse_max_ratio, inv_ratio);
      if (inv_ratio < 0.5 - tolerance || inv_ratio > 2.0 + tolerance) ++rep.inverse_violations;
      if (badness(inv_ratio) > inv_bad) {
        inv_bad = badness(inv_ratio);
        rep.inverse_worst = {inv_ratio, t, x, y};
      }
      rep.max_roundtrip_error = std::max(
          {rep.max_roundtrip_error, (phi(sol, t, ix.x) - x).norm(), (phi(sol, t, iy.x) - y).norm()});
      const double inv_time = (ix2.x - ix.x).norm() / root_gap;
      rep.inverse_time_constant = std::max(rep.inverse_time_constant, inv_time);
      if (inv_time > 2.0 * sol.c_half_t_norm * (1.0 + 1e-9) + 1e-8) ++rep.time_violations;
    } catch (const Error&) {
      ++rep.inverse_failures;
    }
  }
  rep.passed = rep.phi_violations == 0 && rep.inverse_violations == 0 &&
               rep.inverse_failures == 0 && rep.time_violations == 0 &&
               rep.max_roundtrip_error <= 1e-9;
  return rep;
}

}  // namespace ssde
