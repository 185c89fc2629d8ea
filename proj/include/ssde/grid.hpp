#pragma once

#include <array>

#include "ssde/types.hpp"

namespace ssde {

/// Uniform tensor grid on the box [-L, L]^d times a uniform time grid on [0, T].
///
/// Nodes are numbered with the first axis fastest: node = i0 + M*i1 + M*M*i2.
class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis, double time_horizon, int time_steps);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return points_; }
  double time_horizon() const { return horizon_; }
  int time_steps() const { return steps_; }

  double spacing() const { return spacing_; }
  double time_step() const { return dt_; }
  Index node_count() const { return nodes_; }
  double cell_volume() const;

  double time(int k) const { return k * dt_; }
  double coordinate(int i) const { return -half_width_ + i * spacing_; }

  std::array<int, kMaxDim> multi_index(Index node) const;
  Index node_index(const std::array<int, kMaxDim>& idx) const;
  Point node_position(Index node) const;

  bool contains(const Point& x) const;
  bool contains_time(double t) const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_;
  double half_width_;
  int points_;
  double horizon_;
  int steps_;
  double spacing_;
  double dt_;
  Index nodes_;
};

/// Interpolation stencil of a point: piecewise-constant-left in time,
/// multilinear in space (2^d corners).
struct Stencil {
  int time_index = 0;
  int count = 0;
  std::array<Index, 8> nodes{};
  std::array<double, 8> weights{};
};

/// Throws ErrorKind::Domain when (t, x) lies outside [0, T] x [-L, L]^d.
Stencil locate(const Grid& grid, double t, const Point& x);

}  // namespace ssde
