#include "ssde/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssde/error.hpp"
#include "ssde/parallel.hpp"

namespace ssde {

double critical_epsilon(double p, double q, int d) {
  require(p >= 1.0 && q >= 1.0, ErrorKind::Parameter, "exponents must be >= 1");
  require(d >= 1, ErrorKind::Parameter, "dimension must be positive");
  require(!(p == kInf && q == kInf), ErrorKind::Parameter,
          "critical epsilon is undefined for p = q = inf");
  const double iq = 1.0 / q;
  const double ip = 1.0 / p;
  require(iq + d * ip < 1.0, ErrorKind::Precondition,
          "exponents must satisfy 1/q + d/p < 1 (got " + std::to_string(iq + d * ip) + ")");
  return (1.0 - iq - d * ip) / (iq + ip);
}

double threshold(double slice_norm_p, double p, int d, double epsilon) {
  const double gap = p - d - epsilon;
  require(gap > 0.0, ErrorKind::Precondition, "threshold needs p > d + eps");
  if (slice_norm_p == 0.0) return 0.0;
  return std::pow(slice_norm_p, p / gap);
}

int covering_count(int d) {
  // Offsets are measured in units of the cutoff radius on a lattice of pitch 1/2.
  const double reach = 2.0 + 0.25 * std::sqrt(static_cast<double>(d));
  const int span = static_cast<int>(std::floor(2.0 * reach));
  int count = 0;
  for (int i = -span; i <= span; ++i)
    for (int j = (d > 1 ? -span : 0); j <= (d > 1 ? span : 0); ++j)
      for (int k = (d > 2 ? -span : 0); k <= (d > 2 ? span : 0); ++k)
        if (0.25 * (i * i + j * j + k * k) <= reach * reach) ++count;
  return count;
}

DecompositionResult decompose(const SpaceTimeField& f, double p, double q, bool uniformly_local) {
  const Grid& g = f.grid();
  const int d = g.dim();
  require(q != kInf, ErrorKind::Parameter,
          "q = inf is not decomposed: f already lies in L^inf_t L^{d+eps'}_x with eps' = p - d");
  DecompositionResult r{.p = p,
                        .q = q,
                        .epsilon = critical_epsilon(p, q, d),
                        .uniformly_local = uniformly_local,
                        .f_le = f,
                        .f_gt = SpaceTimeField(g, f.codim())};
  const int K = g.time_steps();
  const Index N = g.node_count();
  const MixedNormSpec spec{.q = q, .p = p, .uniformly_local = uniformly_local};
  r.slice_norms.resize(K);
  for (int k = 0; k < K; ++k) r.slice_norms[k] = slice_norm(g, f.slice(k), spec);
  r.le_bound = std::pow(time_composition(r.slice_norms, g.time_step(), q), q / (1.0 + r.epsilon));
  r.gt_bound = uniformly_local ? std::pow(covering_count(d), 1.0 / (d + r.epsilon)) : 1.0;

  std::vector<double> le_sup(K, 0.0);
  r.gt_slice_norms.assign(K, 0.0);
  if (p == kInf) {
    r.thresholds.assign(K, kInf);
    for (int k = 0; k < K; ++k) le_sup[k] = lp_space_norm(g, f.slice(k), kInf);
  } else {
    r.thresholds.resize(K);
    for (int k = 0; k < K; ++k) r.thresholds[k] = threshold(r.slice_norms[k], p, d, r.epsilon);
    RowMatrix le = f.values();
    RowMatrix gt(le.rows(), le.cols());
    parallel_for(static_cast<std::size_t>(K), [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const double R = r.thresholds[k];
        for (Index n = 0; n < N; ++n) {
          const Index row = static_cast<Index>(k) * N + n;
          const bool above = le.row(row).norm() > R;
          for (Index c = 0; c < le.cols(); ++c) {
            const double v = le(row, c);
            if (above) {
              gt(row, c) = v;
              le(row, c) = std::copysign(0.0, v);
            } else {
              gt(row, c) = std::copysign(0.0, v);
            }
          }
        }
      }
    });
    r.f_le = SpaceTimeField(g, f.codim(), std::move(le));
    r.f_gt = SpaceTimeField(g, f.codim(), std::move(gt));
    const MixedNormSpec gt_spec{.p = d + r.epsilon, .uniformly_local = uniformly_local};
    for (int k = 0; k < K; ++k) {
      r.gt_slice_norms[k] = slice_norm(g, r.f_gt.slice(k), gt_spec);
      le_sup[k] = lp_space_norm(g, r.f_le.slice(k), kInf);
    }
  }
  r.certified_gt_norm = *std::max_element(r.gt_slice_norms.begin(), r.gt_slice_norms.end());
  r.certified_le_norm = time_composition(le_sup, g.time_step(), 1.0 + r.epsilon);
  return r;
}

}  // namespace ssde
