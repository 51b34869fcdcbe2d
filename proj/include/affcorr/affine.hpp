#pragma once

#include <cmath>

#include <Eigen/Core>

#include "affcorr/errors.hpp"
#include "affcorr/geometry.hpp"
#include "affcorr/types.hpp"

namespace affcorr {

// Output of the element-wise path: A = b / s together with the transferred
// point. The stored entries satisfy affine(i,j) == b(i,j) / s exactly (same
// division the constructor performed).
template <typename Scalar>
struct AffineResult {
  AffineMap<Scalar> affine;
  Vector2<Scalar> p2;
  Scalar s = Scalar(1);
  Matrix2<Scalar> b;
};

// Three-term split of the affine map,
//   A = (rotation_block - point_dyad - normal_dyad) / s,
// where rotation_block is the upper-left 2x2 of R, point_dyad is
// [u2, v2]^T [R31, R32], and normal_dyad is (t_xy - p2 t_z)/d outer [nx, ny].
template <typename Scalar>
struct AffineDecomposition {
  Matrix2<Scalar> rotation_block;
  Matrix2<Scalar> point_dyad;
  Matrix2<Scalar> normal_dyad;
  Scalar s = Scalar(1);

  AffineMap<Scalar> assemble() const {
    return (rotation_block - point_dyad - normal_dyad) / s;
  }
};

// Shared denominator s = H31 u1 + H32 v1 + H33 = (r3 - (tz/d) n) . [u1, v1, 1].
template <typename Scalar>
Scalar denominator_s(const Pose<Scalar>& pose, const PlaneParams<Scalar>& plane,
                     const Vector2<Scalar>& p1) {
  const Vector3<Scalar> third_row =
      pose.rotation.row(2).transpose() -
      (pose.translation.z() / plane.distance()) * plane.normal();
  const Scalar s = third_row.dot(lift(p1));
  if (std::abs(s) <= Scalar(kDegeneracyEps))
    throw DegenerateDenominator("mapped point lies at infinity");
  return s;
}

// Jacobian of p -> project(H [p, 1]^T) at p1, from the homography entries
// alone: b_ij = H_ij - u2_i H_3j, A = b / s. Scale-invariant in H.
template <typename Derived>
AffineResult<typename Derived::Scalar> affine_from_homography(
    const Eigen::MatrixBase<Derived>& h_expr,
    const Vector2<typename Derived::Scalar>& p1) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  using Scalar = typename Derived::Scalar;
  const Homography<Scalar> h = h_expr;
  const Vector3<Scalar> hp = h * lift(p1);
  const Scalar s = hp(2);
  if (std::abs(s) <= Scalar(kDegeneracyEps))
    throw DegenerateDenominator("mapped point lies at infinity");
  const Scalar u2 = hp(0) / s;
  const Scalar v2 = hp(1) / s;

  AffineResult<Scalar> out;
  out.b << h(0, 0) - u2 * h(2, 0), h(0, 1) - u2 * h(2, 1),
      h(1, 0) - v2 * h(2, 0), h(1, 1) - v2 * h(2, 1);
  out.affine = out.b / s;
  out.p2 = Vector2<Scalar>(u2, v2);
  out.s = s;
  return out;
}

// Element-wise path: transfers p1 through H = R - t n^T / d and evaluates
//   b11 = R11 - u2 R31 - (tx - u2 tz)/d * nx
// and the three analogous components, each divided by s.
template <typename Scalar>
AffineResult<Scalar> affine_elementwise(const Pose<Scalar>& pose,
                                        const PlaneParams<Scalar>& plane,
                                        const Vector2<Scalar>& p1) {
  const Matrix3<Scalar>& r = pose.rotation;
  const Vector3<Scalar>& t = pose.translation;
  const Vector3<Scalar>& n = plane.normal();
  const Scalar d = plane.distance();

  const Scalar s = denominator_s(pose, plane, p1);
  const Homography<Scalar> h = homography_from_pose_plane(pose, plane);
  const Vector2<Scalar> p2 = project((h * lift(p1)).eval());
  const Scalar u2 = p2.x();
  const Scalar v2 = p2.y();

  const Scalar tx_eff = (t.x() - u2 * t.z()) / d;
  const Scalar ty_eff = (t.y() - v2 * t.z()) / d;

  AffineResult<Scalar> out;
  out.b << r(0, 0) - u2 * r(2, 0) - tx_eff * n.x(),
      r(0, 1) - u2 * r(2, 1) - tx_eff * n.y(),
      r(1, 0) - v2 * r(2, 0) - ty_eff * n.x(),
      r(1, 1) - v2 * r(2, 1) - ty_eff * n.y();
  out.affine = out.b / s;
  out.p2 = p2;
  out.s = s;
  return out;
}

// Assembled form: rotation block minus the two dyads, scaled by 1/s. p2 is
// caller-supplied so measured correspondences can be used; with the exact
// transferred p2 the assembled map equals the element-wise path.
template <typename Scalar>
AffineDecomposition<Scalar> affine_unified(const Pose<Scalar>& pose,
                                           const PlaneParams<Scalar>& plane,
                                           const Vector2<Scalar>& p1,
                                           const Vector2<Scalar>& p2) {
  const Matrix3<Scalar>& r = pose.rotation;
  const Vector3<Scalar>& t = pose.translation;

  AffineDecomposition<Scalar> out;
  out.s = denominator_s(pose, plane, p1);
  out.rotation_block = r.template topLeftCorner<2, 2>();
  out.point_dyad = p2 * r.row(2).template head<2>();
  const Vector2<Scalar> t_scaled =
      (t.template head<2>() - p2 * t.z()) / plane.distance();
  out.normal_dyad = t_scaled * plane.normal().template head<2>().transpose();
  return out;
}

// Standard stereo (R = I, t = [baseline, 0, 0]^T): s = 1 identically and
//   A = [[1 - baseline nx / d, -baseline ny / d], [0, 1]].
template <typename Scalar>
AffineMap<Scalar> stereo_affine(Scalar baseline,
                                const PlaneParams<Scalar>& plane) {
  const Scalar shear = baseline / plane.distance();
  AffineMap<Scalar> a;
  a << Scalar(1) - shear * plane.normal().x(), -(shear * plane.normal().y()),
      Scalar(0), Scalar(1);
  return a;
}

template <typename Scalar>
AffineResult<Scalar> pure_translation_affine(const Vector3<Scalar>& t,
                                             const PlaneParams<Scalar>& plane,
                                             const Vector2<Scalar>& p1) {
  return affine_elementwise(Pose<Scalar>{Matrix3<Scalar>::Identity(), t}, plane,
                            p1);
}

// With t = 0 the plane drops out of H entirely, so any valid plane gives the
// same map; a fixed fronto-parallel placeholder is used internally.
template <typename Scalar>
AffineResult<Scalar> pure_rotation_affine(const Matrix3<Scalar>& rotation,
                                          const Vector2<Scalar>& p1) {
  const PlaneParams<Scalar> any_plane(Vector3<Scalar>(0, 0, -1), Scalar(1));
  return affine_elementwise(
      Pose<Scalar>{rotation, Vector3<Scalar>::Zero()}, any_plane, p1);
}

}  // namespace affcorr
