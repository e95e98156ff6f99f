#pragma once

#include <Eigen/Dense>

namespace trsqp {

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Read-only views; accept blocks and maps without copies.
template <typename Scalar>
using VectorRef = Eigen::Ref<const VectorX<Scalar>>;

template <typename Scalar>
using MatrixRef = Eigen::Ref<const MatrixX<Scalar>>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using Index = Eigen::Index;

}  // namespace trsqp
