#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "affcorr/errors.hpp"
#include "affcorr/geometry.hpp"
#include "affcorr/types.hpp"

namespace affcorr {

// A point match together with the 2x2 map of the local image-to-image warp.
template <typename Scalar>
struct AffineCorrespondence {
  Vector2<Scalar> p1;
  Vector2<Scalar> p2;
  AffineMap<Scalar> affine;
};

template <typename Scalar>
struct NormalEstimate {
  Vector3<Scalar> normal;   // unit length, oriented so that distance > 0
  Scalar distance;
  Scalar residual;          // least-squares residual norm of the 4x3 system
  Scalar conditioning;      // sigma_max / sigma_min (may be infinite)
};

// Conditioning above this on the solved (full-rank) system is rejected.
inline constexpr double kConditioningMax = 1e10;
// Relative singular-value cutoff below which a direction is treated as
// structurally unobservable and the minimum-norm solution is returned.
inline constexpr double kRankTol = 1e-13;

// Recovers the tangent plane from one affine correspondence and the known
// pose. With q = n/d as unknown, each of the four relations s(q) a_ij =
// b_ij(q) is linear in q:
//   tau_i q_(j) - a_ij tz (m . q) = R_ij' - a_ij (r3 . m),
// where m = [u1, v1, 1]^T, tau = (tx - u2 tz, ty - v2 tz) and R_ij' collects
// the rotation terms. The stacked 4x3 system is solved in least squares with
// a rank-revealing SVD; translation directions the data cannot see (e.g. the
// q_z column when tz = 0) stay at zero in the minimum-norm solution.
template <typename Scalar>
NormalEstimate<Scalar> estimate_normal(const Pose<Scalar>& pose,
                                       const AffineCorrespondence<Scalar>& ac) {
  const Matrix3<Scalar>& r = pose.rotation;
  const Vector3<Scalar>& t = pose.translation;
  if (t.norm() <= Scalar(kDegeneracyEps))
    throw UninformativeTranslation(
        "affine map carries no plane information when translation is zero");

  const Vector3<Scalar> m = lift(ac.p1);
  const Scalar r3m = r.row(2).transpose().dot(m);
  const Scalar u2 = ac.p2.x();
  const Scalar v2 = ac.p2.y();
  const Scalar tau_x = t.x() - u2 * t.z();
  const Scalar tau_y = t.y() - v2 * t.z();
  const AffineMap<Scalar>& a = ac.affine;

  Eigen::Matrix<Scalar, 4, 3> sys;
  sys.row(0) = Vector3<Scalar>(tau_x, Scalar(0), Scalar(0)).transpose() -
               a(0, 0) * t.z() * m.transpose();
  sys.row(1) = Vector3<Scalar>(Scalar(0), tau_x, Scalar(0)).transpose() -
               a(0, 1) * t.z() * m.transpose();
  sys.row(2) = Vector3<Scalar>(tau_y, Scalar(0), Scalar(0)).transpose() -
               a(1, 0) * t.z() * m.transpose();
  sys.row(3) = Vector3<Scalar>(Scalar(0), tau_y, Scalar(0)).transpose() -
               a(1, 1) * t.z() * m.transpose();

  Eigen::Matrix<Scalar, 4, 1> rhs;
  rhs(0) = r(0, 0) - u2 * r(2, 0) - a(0, 0) * r3m;
  rhs(1) = r(0, 1) - u2 * r(2, 1) - a(0, 1) * r3m;
  rhs(2) = r(1, 0) - v2 * r(2, 0) - a(1, 0) * r3m;
  rhs(3) = r(1, 1) - v2 * r(2, 1) - a(1, 1) * r3m;

  Eigen::JacobiSVD<Eigen::Matrix<Scalar, 4, 3>> svd(
      sys, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(Scalar(kRankTol));
  // GCC misreads Eigen's singular-value storage as possibly uninitialized.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
  const Vector3<Scalar> sigma = svd.singularValues();
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif
  const Scalar conditioning = sigma(0) / sigma(2);
  if (svd.rank() == 3 && !(conditioning <= Scalar(kConditioningMax)))
    throw IllConditioned("normal-recovery system conditioning exceeds 1e10");

  const Vector3<Scalar> q = svd.solve(rhs);
  // Intersection depth along the ray through p1 is -1/(q . m); reject planes
  // strictly behind the first camera. q . m = 0 (plane parallel to this one
  // ray) is kept: it is the structural outcome of the rank-deficient stereo
  // case, where the unobservable q_z stays at zero.
  const Scalar q_norm = q.norm();
  if (!(q_norm > Scalar(0)))
    throw PlaneBehindCamera("recovered plane lies at infinity");
  if (q.dot(m) > Scalar(0))
    throw PlaneBehindCamera(
        "recovered plane has negative intersection depth at p1");
  NormalEstimate<Scalar> out;
  out.normal = q / q_norm;
  out.distance = Scalar(1) / q_norm;
  out.residual = (sys * q - rhs).norm();
  out.conditioning = conditioning;
  return out;
}

}  // namespace affcorr
