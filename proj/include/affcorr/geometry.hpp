#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "affcorr/errors.hpp"
#include "affcorr/types.hpp"

namespace affcorr {

// Relative pose between two calibrated views: x2 = rotation * x1 + translation.
template <typename Scalar>
struct Pose {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();
};

template <typename Derived>
bool is_rotation_matrix(const Eigen::MatrixBase<Derived>& r,
                        typename Derived::Scalar tol =
                            typename Derived::Scalar(1e-9)) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  using Scalar = typename Derived::Scalar;
  if (!r.allFinite()) return false;
  const Matrix3<Scalar> gram = r.transpose() * r - Matrix3<Scalar>::Identity();
  if (gram.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - Scalar(1)) <= tol;
}

template <typename Scalar>
bool is_valid_pose(const Pose<Scalar>& pose, Scalar tol = Scalar(1e-9)) {
  return is_rotation_matrix(pose.rotation, tol) &&
         pose.translation.allFinite();
}

// pose_b_c applied after pose_a_b: x_c = R_bc (R_ab x_a + t_ab) + t_bc.
template <typename Scalar>
Pose<Scalar> compose(const Pose<Scalar>& pose_b_c, const Pose<Scalar>& pose_a_b) {
  return {pose_b_c.rotation * pose_a_b.rotation,
          pose_b_c.rotation * pose_a_b.translation + pose_b_c.translation};
}

// Tangent plane in the first camera frame, implicit form n.x + d = 0.
// The normal is rescaled to unit length on construction and d by the same
// factor, so (n, d) always names the same plane the caller passed in.
template <typename Scalar>
class PlaneParams {
 public:
  PlaneParams(const Vector3<Scalar>& normal, Scalar distance) {
    if (!normal.allFinite() || !std::isfinite(distance))
      throw DegeneratePlane("plane parameters must be finite");
    const Scalar scale = normal.norm();
    if (!(scale > Scalar(0)))
      throw DegeneratePlane("plane normal must be nonzero");
    normal_ = normal / scale;
    distance_ = distance / scale;
    if (std::abs(distance_) <= Scalar(kDegeneracyEps))
      throw DegeneratePlane("plane passes through the first camera center");
  }

  const Vector3<Scalar>& normal() const { return normal_; }
  Scalar distance() const { return distance_; }

 private:
  Vector3<Scalar> normal_;
  Scalar distance_;
};

// Signed distance term d of the plane with unit normal `normal` containing x:
// n_x x + n_y y + n_z z + d = 0, hence d = -(n . x).
template <typename Scalar>
Scalar plane_distance_from_point(const Vector3<Scalar>& normal,
                                 const Vector3<Scalar>& x) {
  const Scalar d = -normal.dot(x);
  if (std::abs(d) < Scalar(kDegeneracyEps))
    throw DegeneratePlane("plane passes through the first camera center");
  return d;
}

template <typename Scalar>
PlaneParams<Scalar> plane_through_point(const Vector3<Scalar>& normal,
                                        const Vector3<Scalar>& x) {
  const Vector3<Scalar> unit = normal.normalized();
  return PlaneParams<Scalar>(unit, plane_distance_from_point(unit, x));
}

// Same plane expressed in the second camera frame.
template <typename Scalar>
PlaneParams<Scalar> transform_plane(const Pose<Scalar>& pose,
                                    const PlaneParams<Scalar>& plane) {
  const Vector3<Scalar> normal2 = pose.rotation * plane.normal();
  const Scalar distance2 = plane.distance() - normal2.dot(pose.translation);
  return PlaneParams<Scalar>(normal2, distance2);
}

// Dehomogenization of a 3-vector: (h1/h3, h2/h3).
template <typename Derived>
Vector2<typename Derived::Scalar> project(const Eigen::MatrixBase<Derived>& h) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  const Vector3<Scalar> v = h;
  if (std::abs(v(2)) <= Scalar(kDegeneracyEps))
    throw PointAtInfinity("homogeneous point has (near-)zero third coordinate");
  return Vector2<Scalar>(v(0) / v(2), v(1) / v(2));
}

// H = R - t n^T / d, the exact point map for points on the plane.
template <typename Scalar>
Homography<Scalar> homography_from_pose_plane(const Pose<Scalar>& pose,
                                              const PlaneParams<Scalar>& plane) {
  return pose.rotation -
         (pose.translation * plane.normal().transpose()) / plane.distance();
}

// Pinhole intrinsics; skew defaults to zero.
template <typename Scalar>
struct Intrinsics {
  Scalar fx = Scalar(1);
  Scalar fy = Scalar(1);
  Scalar cx = Scalar(0);
  Scalar cy = Scalar(0);
  Scalar skew = Scalar(0);

  bool valid() const {
    return fx > Scalar(0) && fy > Scalar(0) && std::isfinite(fx) &&
           std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy) &&
           std::isfinite(skew);
  }

  Matrix3<Scalar> matrix() const {
    Matrix3<Scalar> k;
    k << fx, skew, cx, Scalar(0), fy, cy, Scalar(0), Scalar(0), Scalar(1);
    return k;
  }
};

// K^-1 [u, v, 1]^T dehomogenized; maps pixels to normalized image coordinates.
template <typename Scalar>
Vector2<Scalar> normalize_pixel(const Intrinsics<Scalar>& k,
                                const Vector2<Scalar>& pixel) {
  const Scalar y = (pixel.y() - k.cy) / k.fy;
  const Scalar x = (pixel.x() - k.cx - k.skew * y) / k.fx;
  return Vector2<Scalar>(x, y);
}

template <typename Scalar>
Vector2<Scalar> denormalize_pixel(const Intrinsics<Scalar>& k,
                                  const Vector2<Scalar>& p) {
  return Vector2<Scalar>(k.fx * p.x() + k.skew * p.y() + k.cx,
                         k.fy * p.y() + k.cy);
}

template <typename Scalar>
Matrix3<Scalar> cross_matrix(const Vector3<Scalar>& t) {
  Matrix3<Scalar> m;
  m << Scalar(0), -t.z(), t.y(), t.z(), Scalar(0), -t.x(), -t.y(), t.x(),
      Scalar(0);
  return m;
}

// E = [t]x R; p2^T E p1 = 0 for correspondences induced by any plane.
template <typename Scalar>
EssentialMatrix<Scalar> essential_from_pose(const Pose<Scalar>& pose) {
  if (pose.translation.norm() <= Scalar(kDegeneracyEps))
    throw ZeroTranslation("essential matrix undefined for zero translation");
  return cross_matrix(pose.translation) * pose.rotation;
}

// Epipolar line in the second image for a first-image point, l2 = E p1.
template <typename Scalar>
Vector3<Scalar> epipolar_line_in_second(const EssentialMatrix<Scalar>& e,
                                        const Vector2<Scalar>& p1) {
  return e * lift(p1);
}

template <typename Scalar>
Vector3<Scalar> epipolar_line_in_first(const EssentialMatrix<Scalar>& e,
                                       const Vector2<Scalar>& p2) {
  return e.transpose() * lift(p2);
}

// |p2^T E p1| with E rescaled to unit Frobenius norm and both points lifted.
template <typename Scalar>
Scalar epipolar_residual(const EssentialMatrix<Scalar>& e,
                         const Vector2<Scalar>& p1, const Vector2<Scalar>& p2) {
  const Scalar norm = e.norm();
  if (!(norm > Scalar(0)))
    throw ZeroTranslation("essential matrix must be nonzero");
  return std::abs(lift(p2).dot((e / norm) * lift(p1)));
}

}  // namespace affcorr
