#pragma once

#include <Eigen/Core>

namespace affcorr {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

// Plane-induced point map between the normalized image planes. Meaningful
// only up to scale; consumers must be (and are tested to be) scale-invariant.
template <typename Scalar>
using Homography = Matrix3<Scalar>;

template <typename Scalar>
using EssentialMatrix = Matrix3<Scalar>;

// 2x2 first-order map between the projected patches, row-major layout
// [[a11, a12], [a21, a22]].
template <typename Scalar>
using AffineMap = Matrix2<Scalar>;

// Homogeneous lift [u, v, 1]^T of a normalized image point.
template <typename Derived>
Vector3<typename Derived::Scalar> lift(const Eigen::MatrixBase<Derived>& p) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 2);
  using Scalar = typename Derived::Scalar;
  return Vector3<Scalar>(p(0), p(1), Scalar(1));
}

// Hard degeneracy threshold shared by the plane-distance and
// point-at-infinity checks.
inline constexpr double kDegeneracyEps = 1e-12;

}  // namespace affcorr
