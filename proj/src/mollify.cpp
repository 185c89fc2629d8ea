#include "ssde/mollify.hpp"

#include <cmath>
#include <vector>

#include "ssde/error.hpp"
#include "ssde/parallel.hpp"

namespace ssde {

double bump_weight(double r, double delta) {
  const double s = r / delta;
  if (s >= 1.0) return 0.0;
  const double v = 1.0 - s * s;
  return v * v;
}

namespace {

struct Tap {
  std::array<int, kMaxDim> offset;
  double weight;
};

std::vector<Tap> build_kernel(const Grid& g, double delta) {
  const int r = static_cast<int>(std::floor(delta / g.spacing() + 1e-12));
  std::vector<Tap> taps;
  double total = 0.0;
  std::array<int, kMaxDim> o{0, 0, 0};
  const int span = 2 * r + 1;
  int count = 1;
  for (int a = 0; a < g.dim(); ++a) count *= span;
  for (int c = 0; c < count; ++c) {
    int rem = c;
    double dist2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      o[a] = rem % span - r;
      rem /= span;
      dist2 += (o[a] * g.spacing()) * (o[a] * g.spacing());
    }
    const double w = bump_weight(std::sqrt(dist2), delta);
    if (w > 0.0) {
      taps.push_back({o, w});
      total += w;
    }
  }
  for (auto& t : taps) t.weight /= total;
  return taps;
}

inline int reflect(int i, int m) {
  if (i < 0) return -i;
  if (i > m - 1) return 2 * (m - 1) - i;
  return i;
}

}  // namespace

SpaceTimeField mollify(const SpaceTimeField& field, double delta) {
  const Grid& g = field.grid();
  require(delta > 0.0 && std::isfinite(delta), ErrorKind::Parameter,
          "mollification scale must be positive");
  require(delta <= g.half_width(), ErrorKind::Parameter,
          "mollification scale exceeds the domain half width");
  const std::vector<Tap> taps = build_kernel(g, delta);
  const int m = g.points_per_axis();
  const Index n_nodes = g.node_count();
  const int codim = field.codim();
  const RowMatrix& in = field.values();
  RowMatrix out(in.rows(), in.cols());

  std::vector<int> fresh;  // slices that differ from their predecessor
  for (int k = 0; k < g.time_steps(); ++k) {
    if (k > 0 && field.slice(k) == field.slice(k - 1)) continue;
    fresh.push_back(k);
  }

  parallel_for(fresh.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Index base = static_cast<Index>(fresh[s]) * n_nodes;
      for (Index n = 0; n < n_nodes; ++n) {
        const auto idx = g.multi_index(n);
        Value acc = Value::Zero(codim);
        for (const Tap& tap : taps) {
          std::array<int, kMaxDim> src{0, 0, 0};
          for (int a = 0; a < g.dim(); ++a) src[a] = reflect(idx[a] + tap.offset[a], m);
          acc += tap.weight * in.row(base + g.node_index(src)).transpose();
        }
        out.row(base + n) = acc.transpose();
      }
    }
  });
  for (int k = 1; k < g.time_steps(); ++k) {
    if (field.slice(k) == field.slice(k - 1)) {
      out.middleRows(k * n_nodes, n_nodes) = out.middleRows((k - 1) * n_nodes, n_nodes);
    }
  }
  return SpaceTimeField(g, codim, std::move(out));
}

}  // namespace ssde
