#pragma once

#include <algorithm>

#include "mpcac/types.hpp"

namespace mpcac {

/// Largest Euclidean row norm; 0 for an empty matrix.
template <typename Derived>
double max_row_norm(const Eigen::MatrixBase<Derived>& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  return A.rowwise().norm().maxCoeff();
}

/// Number of singular values above `threshold`.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& A, double threshold) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(A.eval());
  const auto& s = svd.singularValues();
  return static_cast<Index>((s.array() > threshold).count());
}

/// Orthonormal basis (as columns) of { d : A d = 0 }, with singular values at
/// or below `threshold` treated as zero.
Mat null_space(const Eigen::Ref<const Mat>& A, Index cols, double threshold);

/// Stacks two row blocks that share a column count.
Mat vstack(const Eigen::Ref<const Mat>& top, const Eigen::Ref<const Mat>& bottom);

}  // namespace mpcac
