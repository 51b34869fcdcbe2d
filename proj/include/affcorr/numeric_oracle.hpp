#pragma once

#include <cmath>

#include <Eigen/Core>

#include "affcorr/errors.hpp"
#include "affcorr/geometry.hpp"
#include "affcorr/types.hpp"

namespace affcorr {

enum class FdScheme { kCentral, kForward };

template <typename Scalar>
struct FiniteDiffConfig {
  Scalar epsilon = Scalar(1e-6);
  FdScheme scheme = FdScheme::kCentral;
};

namespace detail {

template <typename Scalar>
Vector2<Scalar> homography_warp(const Homography<Scalar>& h,
                                const Vector2<Scalar>& p) {
  const Vector3<Scalar> hp = h * lift(p);
  if (std::abs(hp(2)) <= Scalar(kDegeneracyEps))
    throw DegenerateDenominator("warp undefined at sample point");
  return Vector2<Scalar>(hp(0) / hp(2), hp(1) / hp(2));
}

}  // namespace detail

// Numerical Jacobian of the homography warp. Central differences have O(eps^2)
// truncation error; this is the independent check for the closed-form map.
template <typename Derived>
AffineMap<typename Derived::Scalar> fd_jacobian(
    const Eigen::MatrixBase<Derived>& h_expr,
    const Vector2<typename Derived::Scalar>& p1,
    const FiniteDiffConfig<typename Derived::Scalar>& cfg = {}) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  using Scalar = typename Derived::Scalar;
  const Homography<Scalar> h = h_expr;
  if (!(cfg.epsilon >= Scalar(1e-10) && cfg.epsilon <= Scalar(1e-2)))
    throw InvalidConfig("finite-difference step must lie in [1e-10, 1e-2]");

  const Vector2<Scalar> du(cfg.epsilon, Scalar(0));
  const Vector2<Scalar> dv(Scalar(0), cfg.epsilon);

  AffineMap<Scalar> jac;
  if (cfg.scheme == FdScheme::kCentral) {
    const Scalar two_eps = Scalar(2) * cfg.epsilon;
    jac.col(0) = (detail::homography_warp(h, Vector2<Scalar>(p1 + du)) -
                  detail::homography_warp(h, Vector2<Scalar>(p1 - du))) /
                 two_eps;
    jac.col(1) = (detail::homography_warp(h, Vector2<Scalar>(p1 + dv)) -
                  detail::homography_warp(h, Vector2<Scalar>(p1 - dv))) /
                 two_eps;
  } else {
    const Vector2<Scalar> w0 = detail::homography_warp(h, p1);
    jac.col(0) =
        (detail::homography_warp(h, Vector2<Scalar>(p1 + du)) - w0) /
        cfg.epsilon;
    jac.col(1) =
        (detail::homography_warp(h, Vector2<Scalar>(p1 + dv)) - w0) /
        cfg.epsilon;
  }
  return jac;
}

// Intersection of the first-camera viewing ray through p1 with the plane:
// X = depth * [u1, v1, 1]^T with depth = -d / (n . [u1, v1, 1]).
template <typename Scalar>
Vector3<Scalar> intersect_ray_with_plane(const PlaneParams<Scalar>& plane,
                                         const Vector2<Scalar>& p1) {
  const Vector3<Scalar> ray = lift(p1);
  const Scalar slope = plane.normal().dot(ray);
  if (std::abs(slope) <= Scalar(kDegeneracyEps))
    throw RayParallelToPlane("viewing ray does not meet the plane");
  const Scalar depth = -plane.distance() / slope;
  if (!(depth > Scalar(0)))
    throw NegativeDepth("plane intersection behind the first camera");
  return depth * ray;
}

// Transfer that never touches the homography: intersect the ray with the
// plane, apply the rigid motion, project. Disagreement with project(H p1)
// flags a shared sign error between H and the affine formulas.
template <typename Scalar>
Vector2<Scalar> transfer_via_3d(const Pose<Scalar>& pose,
                                const PlaneParams<Scalar>& plane,
                                const Vector2<Scalar>& p1) {
  const Vector3<Scalar> x1 = intersect_ray_with_plane(plane, p1);
  const Vector3<Scalar> x2 = pose.rotation * x1 + pose.translation;
  if (!(x2.z() > Scalar(kDegeneracyEps)))
    throw NegativeDepth("transferred point behind the second camera");
  return Vector2<Scalar>(x2.x() / x2.z(), x2.y() / x2.z());
}

}  // namespace affcorr
