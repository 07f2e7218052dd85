#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mpcac {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;
using Index = Eigen::Index;

// Sorted, zero-based variable indices. Text and JSON interfaces are one-based.
using IndexList = std::vector<int>;

}  // namespace mpcac
