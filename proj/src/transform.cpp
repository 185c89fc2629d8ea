#include "ssde/transform.hpp"

#include <algorithm>
#include <cmath>

#include "ssde/error.hpp"
#include "ssde/norms.hpp"

namespace ssde {

TransformedPoint transformed_at(const CoefficientSet& coeffs, const ZvonkinSolution& sol, double t,
                                const Point& y) {
  const int d = coeffs.dim();
  const Point x = phi_inverse(sol, t, y).x;
  const Stencil s = locate(coeffs.grid(), t, x);
  const SmallMatrix jac =
      SmallMatrix::Identity(d, d) + as_matrix(sol.grad_u.evaluate(s), d);
  const Point b1 = coeffs.b1.evaluate(s);
  return {sol.lambda_bar * Point(sol.u.evaluate(s)) + jac * b1, jac * coeffs.diffusion(s)};
}

GrowthEnvelope growth_envelope_h(const CoefficientSet& coeffs, double lambda_bar, double epsilon) {
  const Grid& g = coeffs.grid();
  GrowthEnvelope env;
  env.h.resize(g.time_steps());
  for (int k = 0; k < g.time_steps(); ++k) {
    env.h[k] = lambda_bar + 4.0 * linear_growth_envelope(g, coeffs.b1.slice(k));
  }
  env.l1 = time_composition(env.h, g.time_step(), 1.0);
  env.l1e = time_composition(env.h, g.time_step(), 1.0 + epsilon);
  return env;
}

TransformedCoefficients transformed_coefficients(const CoefficientSet& coeffs,
                                                 const ZvonkinSolution& sol, double epsilon) {
  check_shapes(coeffs);
  const Grid& g = coeffs.grid();
  require(sol.u.grid() == g, ErrorKind::Parameter, "transform and coefficients use different grids");
  const int d = g.dim();
  const int K = g.time_steps();
  const Index N = g.node_count();
  RowMatrix bt(static_cast<Index>(K) * N, d);
  RowMatrix st(static_cast<Index>(K) * N, d * d);
  std::vector<char> valid(static_cast<std::size_t>(K) * N, 1);
  TransformedCoefficients out{.b_tilde = SpaceTimeField(g, d), .sigma_tilde = SpaceTimeField(g, d * d)};

  for (int k = 0; k < K; ++k) {
    const double t = g.time(k);
    for (Index n = 0; n < N; ++n) {
      const Index row = static_cast<Index>(k) * N + n;
      try {
        const TransformedPoint tp = transformed_at(coeffs, sol, t, g.node_position(n));
        bt.row(row) = tp.b_tilde.transpose();
        st.row(row) = flatten(tp.sigma_tilde).transpose();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain && e.kind() != ErrorKind::Solver) throw;
        valid[row] = 0;
        ++out.excluded_nodes;
        bt.row(row) = coeffs.b1.values().row(row);
        st.row(row) = coeffs.sigma.values().row(row);
      }
    }
  }
  out.b_tilde = SpaceTimeField(g, d, std::move(bt));
  out.sigma_tilde = SpaceTimeField(g, d * d, std::move(st));

  const GrowthEnvelope env = growth_envelope_h(coeffs, sol.lambda_bar, epsilon);
  out.h = env.h;
  out.h_l1 = env.l1;
  out.h_l1e = env.l1e;

  // Independent nodewise re-verification; nothing below reuses cached norms.
  bool ok = true;
  out.envelope_b_tilde.resize(K);
  out.envelope_margin.resize(K);
  for (int k = 0; k < K; ++k) {
    double worst = 0.0;
    for (Index n = 0; n < N; ++n) {
      const Index row = static_cast<Index>(k) * N + n;
      if (!valid[row]) continue;
      const double r = out.b_tilde.values().row(row).norm() / (1.0 + g.node_position(n).norm());
      worst = std::max(worst, r);
    }
    out.envelope_b_tilde[k] = worst;
    out.envelope_margin[k] = out.h[k] - worst;
    ok = ok && out.envelope_margin[k] >= -1e-12;
  }
  for (Index row = 0; row < static_cast<Index>(K) * N; ++row) {
    out.sigma_sup = std::max(out.sigma_sup,
                             operator_norm(as_matrix(coeffs.sigma.values().row(row).transpose(), d)));
    if (!valid[row]) continue;
    out.sigma_tilde_sup = std::max(
        out.sigma_tilde_sup, operator_norm(as_matrix(out.sigma_tilde.values().row(row).transpose(), d)));
  }
  ok = ok && out.sigma_tilde_sup <= 2.0 * out.sigma_sup + 1e-12;
  out.certificate_ok = ok;
  return out;
}

double gronwall_bound(double y0_abs, double z_sup, double h_l1) {
  require(y0_abs >= 0.0 && z_sup >= 0.0 && h_l1 >= 0.0, ErrorKind::Parameter,
          "Gronwall bound inputs must be nonnegative");
  return std::exp(h_l1) * (y0_abs + z_sup);
}

double x_path_bound(double x0_abs, double z_holder_norm, const PathBoundConstants& c) {
  require(x0_abs >= 0.0 && z_holder_norm >= 0.0, ErrorKind::Parameter,
          "path bound inputs must be nonnegative");
  const double gamma = c.epsilon / (1.0 + c.epsilon);
  double tau = 0.0;
  if (gamma <= 0.5) {
    tau = std::pow(c.time_horizon, 0.5 - gamma);
  } else {
    require(c.min_time_gap > 0.0, ErrorKind::Parameter,
            "Hoelder exponent above 1/2 needs the shortest time gap");
    tau = std::pow(c.min_time_gap, 0.5 - gamma);
  }
  const double y_sup = std::exp(c.h_l1) * (1.0 + x0_abs + 0.5 + z_holder_norm) - 1.0;
  const double y_holder = (1.0 + y_sup) * c.h_l1e + z_holder_norm;
  return y_sup + 0.5 + 2.0 * y_holder + 2.0 * c.c_half_t_norm * tau;
}

}  // namespace ssde
