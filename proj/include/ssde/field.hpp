#pragma once

#include <functional>

#include "ssde/grid.hpp"

namespace ssde {

/// A vector-valued function sampled on a Grid.
///
/// Values are stored as a (time_steps * node_count) x codim row-major matrix;
/// the row for (k, node) is k * node_count + node. Immutable after
/// construction, so concurrent readers are safe.
class SpaceTimeField {
 public:
  using SliceView = Eigen::Block<const RowMatrix, Eigen::Dynamic, Eigen::Dynamic, true>;

  /// Zero field.
  SpaceTimeField(const Grid& grid, int codim);
  /// Takes ownership of the values; throws ErrorKind::Data on non-finite entries.
  SpaceTimeField(const Grid& grid, int codim, RowMatrix values);

  /// Samples fn(t, x) at every grid node and time.
  static SpaceTimeField from_function(const Grid& grid, int codim,
                                      const std::function<Value(double, const Point&)>& fn);
  static SpaceTimeField constant(const Grid& grid, const Value& c);

  const Grid& grid() const { return grid_; }
  int codim() const { return codim_; }
  const RowMatrix& values() const { return values_; }

  SliceView slice(int k) const {
    return values_.middleRows(static_cast<Index>(k) * grid_.node_count(), grid_.node_count());
  }
  Value at(int k, Index node) const {
    return values_.row(static_cast<Index>(k) * grid_.node_count() + node).transpose();
  }

  Value evaluate(const Stencil& s) const;
  Value evaluate(double t, const Point& x) const { return evaluate(locate(grid_, t, x)); }

 private:
  Grid grid_;
  int codim_;
  RowMatrix values_;
};

/// Pointwise linear combination alpha*f + beta*g (same grid and codim).
SpaceTimeField combine(double alpha, const SpaceTimeField& f, double beta, const SpaceTimeField& g);

}  // namespace ssde
