#pragma once

#include "ssde/field.hpp"

namespace ssde {

/// Polynomial bump (1 - |y/delta|^2)^2_+ evaluated at |y| = r.
double bump_weight(double r, double delta);

/// Spatial convolution of every time slice with the grid-normalized bump of
/// radius delta. The box is extended by mirror reflection about its faces.
/// Weights are nonnegative and sum to one, so constants are preserved and the
/// sup norm cannot grow. A delta below one grid spacing is the identity.
///
/// Throws ErrorKind::Parameter when delta <= 0 or delta > half_width.
SpaceTimeField mollify(const SpaceTimeField& field, double delta);

}  // namespace ssde
