#pragma once

#include <Eigen/Core>

namespace lad {

/// Row-major 2-D tensor: one feature row per instance. The project-wide
/// default scalar is double; float backs the real32 training path.
template <class Scalar>
using Tensor2T = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Tensor2 = Tensor2T<double>;

template <class Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Vector = VectorT<double>;

using Index = Eigen::Index;

}  // namespace lad
