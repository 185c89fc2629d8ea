#include "ssde/density.hpp"

#include <algorithm>
#include <cmath>

#include "ssde/decomposition.hpp"
#include "ssde/mollify.hpp"
#include "ssde/norms.hpp"
#include "ssde/parallel.hpp"
#include "ssde/quadrature.hpp"
#include "ssde/zvonkin.hpp"

namespace ssde {

double EmpiricalDensity::bin_volume() const { return std::pow(bin_width(), dim); }

Grid EmpiricalDensity::bin_grid() const {
  return Grid(dim, half_width - 0.5 * bin_width(), bins, times.back(),
              static_cast<int>(times.size()));
}

Point EmpiricalDensity::bin_center(Index bin) const {
  Point c(dim);
  for (int a = 0; a < dim; ++a) {
    c[a] = -half_width + (static_cast<double>(bin % bins) + 0.5) * bin_width();
    bin /= bins;
  }
  return c;
}

SpaceTimeField EmpiricalDensity::density_field() const {
  RowMatrix rho(static_cast<Index>(times.size()) * bin_count(), 1);
  for (Index k = 0; k < masses.rows(); ++k)
    rho.middleRows(k * bin_count(), bin_count()) = masses.row(k).transpose() / bin_volume();
  return SpaceTimeField(bin_grid(), 1, std::move(rho));
}

EmpiricalDensity empirical_density(const PathEnsemble& ens, double half_width, int bins,
                                   double bandwidth) {
  require(ens.n_paths() > 0, ErrorKind::Parameter, "empirical density of an empty ensemble");
  require(bins >= 8, ErrorKind::Parameter, "need at least 8 bins per axis");
  require(half_width > 0.0 && bandwidth >= 0.0, ErrorKind::Parameter,
          "invalid histogram box or bandwidth");
  EmpiricalDensity dens{.dim = ens.dim,
                        .half_width = half_width,
                        .bins = bins,
                        .bandwidth = bandwidth,
                        .times = ens.times};
  const int d = ens.dim;
  Index count = 1;
  for (int a = 0; a < d; ++a) count *= bins;
  const int n_times = ens.n_times();
  dens.masses = RowMatrix::Zero(n_times, count);
  const double w = dens.bin_width();
  const double unit = 1.0 / static_cast<double>(ens.n_paths());
  for (Index p = 0; p < ens.n_paths(); ++p) {
    for (int k = 0; k < n_times; ++k) {
      if (!ens.alive_at(p, k)) break;
      const Point x = ens.state(p, k);
      Index bin = 0;
      Index stride = 1;
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        if (std::abs(x[a]) > half_width) inside = false;
        const int i = std::clamp(static_cast<int>(std::floor((x[a] + half_width) / w)), 0, bins - 1);
        bin += i * stride;
        stride *= bins;
      }
      if (inside) dens.masses(k, bin) += unit;
    }
  }
  dens.alive_fraction.resize(n_times);
  for (int k = 0; k < n_times; ++k) dens.alive_fraction[k] = dens.masses.row(k).sum();

  if (bandwidth > 0.0) {
    RowMatrix stacked(static_cast<Index>(n_times) * count, 1);
    for (int k = 0; k < n_times; ++k)
      stacked.middleRows(static_cast<Index>(k) * count, count) = dens.masses.row(k).transpose();
    const SpaceTimeField smooth = mollify(SpaceTimeField(dens.bin_grid(), 1, std::move(stacked)), bandwidth);
    for (int k = 0; k < n_times; ++k) {
      const auto slice = smooth.slice(k);
      const double total = slice.sum();
      dens.masses.row(k) = slice.transpose();
      if (total > 0.0) dens.masses.row(k) *= dens.alive_fraction[k] / total;
    }
  }
  return dens;
}

double density_mixed_norm(const EmpiricalDensity& density, double p, double q) {
  require(p > 1.0 && p < kInf && q > 1.0 && q < kInf, ErrorKind::Precondition,
          "density exponents must lie in (1, inf)");
  require(1.0 / q + density.dim / p > density.dim, ErrorKind::Precondition,
          "density exponents must satisfy 1/q + d/p > d");
  return mixed_norm(density.density_field(), MixedNormSpec{.q = q, .p = p});
}

std::vector<DensityUniformity> density_uniformity(
    const std::vector<const EmpiricalDensity*>& levels,
    const std::vector<std::pair<double, double>>& exponents, double first_moment, double margin) {
  require(!levels.empty(), ErrorKind::Parameter, "density uniformity needs at least one level");
  std::vector<DensityUniformity> out;
  for (const auto& [p, q] : exponents) {
    DensityUniformity u{.p_tilde = p, .q_tilde = q};
    for (const EmpiricalDensity* dens : levels) u.norms.push_back(density_mixed_norm(*dens, p, q));
    const auto [lo, hi] = std::minmax_element(u.norms.begin(), u.norms.end());
    u.sup = *hi;
    u.spread = *lo > 0.0 ? (*hi - *lo) / *lo : kInf;
    u.constant = margin * u.norms.front() / (1.0 + first_moment);
    u.ceiling = u.constant * (1.0 + first_moment);
    u.bounded = u.sup <= u.ceiling;
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<TestFunction> fixed_test_bank(int dim) {
  std::vector<TestFunction> bank;
  int centers = 1;
  for (int a = 0; a < dim; ++a) centers *= 3;
  for (int c = 0; c < centers; ++c) {
    Point center(dim);
    int rem = c;
    for (int a = 0; a < dim; ++a) {
      center[a] = rem % 3 - 1.0;
      rem /= 3;
    }
    for (double s : {2.0, 3.0, 4.0})
      for (int profile : {0, 1}) bank.push_back({center, s, profile});
  }
  return bank;
}

TestFunctionValue bump_test_function(const TestFunction& tf, const Point& x) {
  const int d = static_cast<int>(x.size());
  TestFunctionValue v{0.0, Point::Zero(d), SmallMatrix::Zero(d, d)};
  const Point y = (x - tf.center) / tf.scale;
  const double r2 = y.squaredNorm();
  if (r2 >= 1.0) return v;
  const double den = 1.0 - r2;
  v.value = std::exp(1.0 - 1.0 / den);
  const Point dg = -2.0 * y / (den * den);
  v.gradient = v.value * dg / tf.scale;
  SmallMatrix hg = (-2.0 / (den * den)) * SmallMatrix::Identity(d, d) -
                   (8.0 / (den * den * den)) * (y * y.transpose());
  v.hessian = v.value * (dg * dg.transpose() + hg) / (tf.scale * tf.scale);
  return v;
}

namespace {

int slice_index(const Grid& g, double t) {
  return std::min(g.time_steps() - 1, static_cast<int>(std::floor(t / g.time_step() + 1e-12)));
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) s += 0.5 * (v[k] + v[k + 1]) * (t[k + 1] - t[k]);
  return s;
}

}  // namespace

namespace {

// Bin averages of phi and of the generator pieces for one coefficient slice.
struct BinAverages {
  std::vector<double> value, abs_value, drift, abs_drift, diffusion, abs_diffusion;
};

}  // namespace

ResidualTable fokker_planck_residual(const EmpiricalDensity& dens, const CoefficientSet& coeffs,
                                     const std::vector<TestFunction>& bank, const InitialLaw* initial) {
  const int d = dens.dim;
  require(coeffs.dim() == d, ErrorKind::Parameter, "coefficients and density differ in dimension");
  const Grid& cg = coeffs.grid();
  const double L = std::min(dens.half_width, cg.half_width());
  const double w = dens.bin_width();
  const double T = dens.times.back();
  const QuadratureRule gl = gauss_legendre(3);
  const int n_times = static_cast<int>(dens.times.size());
  ResidualTable table;
  table.entries.resize(bank.size());

  parallel_for(bank.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const TestFunction& tf = bank[e];
      ResidualEntry& entry = table.entries[e];
      entry.test = tf;
      if (tf.center.cwiseAbs().maxCoeff() + tf.scale >= L) {
        entry.skipped = true;
        continue;
      }
      std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
      for (int a = 0; a < d; ++a) {
        lo[a] = std::max(0, static_cast<int>(std::floor((tf.center[a] - tf.scale + dens.half_width) / w)));
        hi[a] = std::min(dens.bins - 1,
                         static_cast<int>(std::floor((tf.center[a] + tf.scale + dens.half_width) / w)));
      }
      std::vector<Index> support;
      {
        std::array<int, kMaxDim> idx = lo;
        while (true) {
          Index bin = 0, stride = 1;
          for (int a = 0; a < d; ++a) {
            bin += idx[a] * stride;
            stride *= dens.bins;
          }
          support.push_back(bin);
          int a = 0;
          for (; a < d; ++a) {
            if (++idx[a] <= hi[a]) break;
            idx[a] = lo[a];
          }
          if (a == d) break;
        }
      }

      // The bump varies on the scale s / 16 near its edge; panels resolve it.
      const int panels = std::max(1, static_cast<int>(std::ceil(w / (tf.scale / 16.0))));
      const int per_axis = 3 * panels;
      int points = 1;
      for (int a = 0; a < d; ++a) points *= per_axis;
      std::vector<double> offset(per_axis), weight(per_axis);
      for (int p = 0; p < panels; ++p) {
        for (int q = 0; q < 3; ++q) {
          offset[3 * p + q] = w * ((p + 0.5 + 0.5 * gl.nodes[q]) / panels - 0.5);
          weight[3 * p + q] = 0.5 * gl.weights[q] / panels;
        }
      }

      auto averages = [&](int slice) {
        BinAverages avg;
        for (auto* v : {&avg.value, &avg.abs_value, &avg.drift, &avg.abs_drift, &avg.diffusion, &avg.abs_diffusion})
          v->assign(support.size(), 0.0);
        const double t = cg.time(slice);
        for (std::size_t i = 0; i < support.size(); ++i) {
          const Point c = dens.bin_center(support[i]);
          for (int q = 0; q < points; ++q) {
            Point x(d);
            double wt = 1.0;
            int rem = q;
            for (int a = 0; a < d; ++a) {
              x[a] = c[a] + offset[rem % per_axis];
              wt *= weight[rem % per_axis];
              rem /= per_axis;
            }
            const TestFunctionValue v = bump_test_function(tf, x);
            if (v.value == 0.0) continue;
            const Stencil st = locate(cg, t, x);
            const Point b = coeffs.drift(st);
            const SmallMatrix sig = coeffs.diffusion(st);
            const double b_term = b.dot(v.gradient);
            const double a_term = 0.5 * ((sig * sig.transpose()).cwiseProduct(v.hessian)).sum();
            avg.value[i] += wt * v.value;
            avg.abs_value[i] += wt * std::abs(v.value);
            avg.drift[i] += wt * b_term;
            avg.abs_drift[i] += wt * std::abs(b_term);
            avg.diffusion[i] += wt * a_term;
            avg.abs_diffusion[i] += wt * std::abs(a_term);
          }
        }
        return avg;
      };

      const double dtheta = tf.time_profile == 0 ? 0.0 : -0.5 / T;
      auto theta = [&](double t) { return tf.time_profile == 0 ? 1.0 : 1.0 - 0.5 * t / T; };
      std::vector<double> gen(n_times, 0.0), gen_abs(n_times, 0.0), pair(n_times, 0.0);
      int cached_slice = -1;
      BinAverages avg;
      for (int k = 0; k < n_times; ++k) {
        const double t = dens.times[k];
        const int slice = slice_index(cg, std::min(t, cg.time_horizon()));
        if (slice != cached_slice) {
          avg = averages(slice);
          cached_slice = slice;
        }
        const double th = theta(t);
        for (std::size_t i = 0; i < support.size(); ++i) {
          const double mass = dens.masses(k, support[i]);
          if (mass == 0.0) continue;
          pair[k] += mass * th * avg.value[i];
          gen[k] += mass * (dtheta * avg.value[i] + th * (avg.drift[i] + avg.diffusion[i]));
          gen_abs[k] += mass * (std::abs(dtheta) * avg.abs_value[i] + th * (avg.abs_drift[i] + avg.abs_diffusion[i]));
        }
      }
      if (initial) {
        // mu_0 is data, so its pairing is taken from the law rather than the histogram.
        pair.front() = theta(dens.times.front()) *
                       initial->expectation([&](const Point& x) { return bump_test_function(tf, x).value; }, cg);
      }
      entry.residual = pair.back() - pair.front() - trapezoid(dens.times, gen);
      entry.scale = std::abs(pair.back()) + std::abs(pair.front()) + trapezoid(dens.times, gen_abs);
      entry.relative = entry.scale > 0.0 ? std::abs(entry.residual) / entry.scale : 0.0;
    }
  });

  double sq = 0.0;
  int used = 0;
  for (const ResidualEntry& e : table.entries) {
    if (e.skipped) continue;
    table.max_abs = std::max(table.max_abs, std::abs(e.residual));
    table.max_relative = std::max(table.max_relative, e.relative);
    sq += e.residual * e.residual;
    ++used;
  }
  table.rms_abs = used > 0 ? std::sqrt(sq / used) : 0.0;

  std::vector<double> drift_l1(n_times, 0.0), diff_l1(n_times, 0.0);
  for (int k = 0; k < n_times; ++k) {
    const double t = std::min(dens.times[k], cg.time_horizon());
    for (Index b = 0; b < dens.bin_count(); ++b) {
      const double mass = dens.masses(k, b);
      if (mass == 0.0) continue;
      const Point c = dens.bin_center(b);
      if (!cg.contains(c)) continue;
      const Stencil s = locate(cg, t, c);
      const SmallMatrix sig = coeffs.diffusion(s);
      drift_l1[k] += mass * coeffs.drift(s).norm();
      diff_l1[k] += mass * (sig * sig.transpose()).norm();
    }
  }
  table.drift_l1 = trapezoid(dens.times, drift_l1);
  table.diffusion_l1 = trapezoid(dens.times, diff_l1);
  return table;
}

double duality_pairing(const SpaceTimeField& f, const EmpiricalDensity& dens) {
  require(f.codim() == 1, ErrorKind::Parameter, "duality pairing needs a scalar field");
  const Grid& g = f.grid();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < dens.times.size(); ++k) {
    const double dt = dens.times[k + 1] - dens.times[k];
    const double t = std::min(dens.times[k], g.time_horizon());
    double acc = 0.0;
    for (Index b = 0; b < dens.bin_count(); ++b) {
      const double mass = dens.masses(static_cast<Index>(k), b);
      if (mass == 0.0) continue;
      acc += mass * f.evaluate(t, dens.bin_center(b))[0];
    }
    total += dt * acc;
  }
  return total;
}

DualityCheck duality_check(const SpaceTimeField& f, const EmpiricalDensity& dens,
                           const PathEnsemble& ens, const CoefficientSet& coeffs, double p_tilde,
                           double q_tilde, double lambda) {
  require(f.grid() == coeffs.grid(), ErrorKind::Parameter,
          "test field and coefficients must share one grid");
  const Grid& g = f.grid();
  const double p_dual = p_tilde / (p_tilde - 1.0);
  const double q_dual = q_tilde / (q_tilde - 1.0);
  DualityCheck c{.p_tilde = p_tilde, .q_tilde = q_tilde, .lambda = lambda};
  const DecompositionResult split = decompose(f, p_dual, q_dual);
  c.dual_norm = mixed_norm(f, MixedNormSpec{.q = q_dual, .p = p_dual});
  c.pairing = duality_pairing(f, dens);
  c.le_pairing = duality_pairing(split.f_le, dens);
  c.gt_pairing = duality_pairing(split.f_gt, dens);

  const auto& t = dens.times;
  std::vector<double> mean_abs(t.size(), 0.0);
  for (int k = 0; k < static_cast<int>(t.size()); ++k) {
    double s = 0.0;
    Index n = 0;
    for (Index p = 0; p < ens.n_paths(); ++p) {
      if (!ens.alive_at(p, k)) continue;
      s += ens.state(p, k).norm();
      ++n;
    }
    mean_abs[k] = n > 0 ? s / static_cast<double>(n) : 0.0;
  }

  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    c.le_bound += (t[k + 1] - t[k]) * lp_space_norm(g, split.f_le.slice(slice_index(g, t[k])), kInf);
  }
  c.le_ok = std::abs(c.le_pairing) <= c.le_bound * (1.0 + 1e-12) + 1e-15;

  const ZvonkinSolution sol =
      solve_backward_pde(diffusion_tensor(coeffs.sigma), coeffs.b2, split.f_gt, lambda);
  double u_time = 0.0;
  for (int k = 0; k + 1 < g.time_steps(); ++k) {
    u_time += g.time_step() * lp_space_norm(g, sol.u.slice(k), kInf);
  }
  const double grad_sup = magnitudes(sol.grad_u.values()).maxCoeff();
  double drift_part = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double env = linear_growth_envelope(g, coeffs.b1.slice(slice_index(g, t[k])));
    drift_part += (t[k + 1] - t[k]) * env * (1.0 + mean_abs[k]);
  }
  c.gt_bound = lp_space_norm(g, sol.u.slice(0), kInf) + lambda * u_time + grad_sup * drift_part;
  c.gt_ok = std::abs(c.gt_pairing) <= c.gt_bound + 1e-12;
  const double denom = c.dual_norm * (1.0 + mean_abs.front());
  c.empirical_constant = denom > 0.0 ? std::abs(c.pairing) / denom : 0.0;
  return c;
}

}  // namespace ssde
