#pragma once

#include <Eigen/Core>

namespace ssde {

using Index = Eigen::Index;

// Spatial dimension never exceeds 3, so points and small matrices live on
// the stack.
inline constexpr int kMaxDim = 3;
// Largest value dimension of a field: a d x d matrix flattened row-major.
inline constexpr int kMaxCodim = kMaxDim * kMaxDim;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Value = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxCodim, 1>;

// Row-major storage so that one (time, node) record is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace ssde
