#include "ssde/field.hpp"

#include <cmath>

#include "ssde/error.hpp"

namespace ssde {

SpaceTimeField::SpaceTimeField(const Grid& grid, int codim)
    : grid_(grid),
      codim_(codim),
      values_(RowMatrix::Zero(grid.time_steps() * grid.node_count(), codim)) {
  require(codim >= 1 && codim <= kMaxCodim, ErrorKind::Parameter,
          "field codim must lie in [1, 9]");
}

SpaceTimeField::SpaceTimeField(const Grid& grid, int codim, RowMatrix values)
    : grid_(grid), codim_(codim), values_(std::move(values)) {
  require(codim >= 1 && codim <= kMaxCodim, ErrorKind::Parameter,
          "field codim must lie in [1, 9]");
  require(values_.rows() == grid.time_steps() * grid.node_count() && values_.cols() == codim,
          ErrorKind::Parameter, "field value array does not match grid shape");
  require(values_.allFinite(), ErrorKind::Data, "field values must be finite");
}

SpaceTimeField SpaceTimeField::from_function(
    const Grid& grid, int codim, const std::function<Value(double, const Point&)>& fn) {
  RowMatrix values(grid.time_steps() * grid.node_count(), codim);
  for (int k = 0; k < grid.time_steps(); ++k) {
    const double t = grid.time(k);
    for (Index n = 0; n < grid.node_count(); ++n) {
      const Value v = fn(t, grid.node_position(n));
      require(v.size() == codim, ErrorKind::Parameter, "generator returned wrong codim");
      values.row(k * grid.node_count() + n) = v.transpose();
    }
  }
  return SpaceTimeField(grid, codim, std::move(values));
}

SpaceTimeField SpaceTimeField::constant(const Grid& grid, const Value& c) {
  const auto codim = static_cast<int>(c.size());
  RowMatrix values = c.transpose().replicate(grid.time_steps() * grid.node_count(), 1);
  return SpaceTimeField(grid, codim, std::move(values));
}

Value SpaceTimeField::evaluate(const Stencil& s) const {
  const Index base = static_cast<Index>(s.time_index) * grid_.node_count();
  Value out = Value::Zero(codim_);
  for (int c = 0; c < s.count; ++c) {
    if (s.weights[c] == 0.0) continue;
    out += s.weights[c] * values_.row(base + s.nodes[c]).transpose();
  }
  return out;
}

SpaceTimeField combine(double alpha, const SpaceTimeField& f, double beta,
                       const SpaceTimeField& g) {
  require(f.grid() == g.grid() && f.codim() == g.codim(), ErrorKind::Parameter,
          "combine: fields must share grid and codim");
  return SpaceTimeField(f.grid(), f.codim(), alpha * f.values() + beta * g.values());
}

}  // namespace ssde
