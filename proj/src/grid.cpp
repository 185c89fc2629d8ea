#include "ssde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssde/error.hpp"

namespace ssde {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Data: return "data";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Ellipticity: return "ellipticity";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Simulation: return "simulation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {
constexpr double kSnap = 1e-12;
constexpr double kDomainSlack = 1e-12;
}  // namespace

Grid::Grid(int dim, double half_width, int points_per_axis, double time_horizon, int time_steps)
    : dim_(dim),
      half_width_(half_width),
      points_(points_per_axis),
      horizon_(time_horizon),
      steps_(time_steps) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::Parameter, "grid dimension must be 1, 2 or 3");
  require(std::isfinite(half_width) && half_width > 0, ErrorKind::Parameter,
          "grid half width must be positive");
  require(points_per_axis >= 8, ErrorKind::Parameter, "grid needs at least 8 points per axis");
  require(std::isfinite(time_horizon) && time_horizon > 0, ErrorKind::Parameter,
          "time horizon must be positive");
  require(time_steps >= 2, ErrorKind::Parameter, "time grid needs at least 2 points");
  spacing_ = 2.0 * half_width_ / (points_ - 1);
  dt_ = horizon_ / (steps_ - 1);
  nodes_ = 1;
  for (int i = 0; i < dim_; ++i) nodes_ *= points_;
}

double Grid::cell_volume() const { return std::pow(spacing_, dim_); }

std::array<int, kMaxDim> Grid::multi_index(Index node) const {
  std::array<int, kMaxDim> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<int>(node % points_);
    node /= points_;
  }
  return idx;
}

Index Grid::node_index(const std::array<int, kMaxDim>& idx) const {
  Index node = 0;
  for (int a = dim_ - 1; a >= 0; --a) node = node * points_ + idx[a];
  return node;
}

Point Grid::node_position(Index node) const {
  Point x(dim_);
  for (int a = 0; a < dim_; ++a) {
    x[a] = coordinate(static_cast<int>(node % points_));
    node /= points_;
  }
  return x;
}

bool Grid::contains(const Point& x) const {
  if (x.size() != dim_) return false;
  const double bound = half_width_ * (1.0 + kDomainSlack);
  for (int a = 0; a < dim_; ++a) {
    if (!(std::abs(x[a]) <= bound)) return false;
  }
  return true;
}

bool Grid::contains_time(double t) const {
  return t >= -horizon_ * kDomainSlack && t <= horizon_ * (1.0 + kDomainSlack);
}

bool Grid::operator==(const Grid& o) const {
  return dim_ == o.dim_ && half_width_ == o.half_width_ && points_ == o.points_ &&
         horizon_ == o.horizon_ && steps_ == o.steps_;
}

Stencil locate(const Grid& grid, double t, const Point& x) {
  if (!grid.contains_time(t) || !grid.contains(x)) {
    std::ostringstream msg;
    msg << "point (t=" << t << ", x=" << x.transpose() << ") outside domain [0,"
        << grid.time_horizon() << "] x [-" << grid.half_width() << "," << grid.half_width()
        << "]^" << grid.dim();
    fail(ErrorKind::Domain, msg.str());
  }
  Stencil s;
  const int last_step = grid.time_steps() - 1;
  int k = static_cast<int>(std::floor(t / grid.time_step() + kSnap));
  s.time_index = std::clamp(k, 0, last_step);

  const int m = grid.points_per_axis();
  std::array<int, kMaxDim> base{0, 0, 0};
  std::array<double, kMaxDim> frac{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    const double pos = (x[a] + grid.half_width()) / grid.spacing();
    int i = static_cast<int>(std::floor(pos));
    double f = pos - i;
    if (f > 1.0 - kSnap) {
      ++i;
      f = 0.0;
    } else if (f < kSnap) {
      f = 0.0;
    }
    if (i >= m - 1) {
      i = m - 2;
      f = 1.0;
    } else if (i < 0) {
      i = 0;
      f = 0.0;
    }
    base[a] = i;
    frac[a] = f;
  }

  s.count = 1 << grid.dim();
  for (int c = 0; c < s.count; ++c) {
    std::array<int, kMaxDim> idx = base;
    double w = 1.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const bool upper = (c >> a) & 1;
      idx[a] += upper ? 1 : 0;
      w *= upper ? frac[a] : 1.0 - frac[a];
    }
    s.nodes[c] = grid.node_index(idx);
    s.weights[c] = w;
  }
  return s;
}

}  // namespace ssde
