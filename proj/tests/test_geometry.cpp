#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include <Eigen/SVD>

#include "test_support.hpp"

using namespace affcorr;
using namespace affcorr::test;

TEST_CASE("homography from pose and plane: hand cases") {
  SUBCASE("unit baseline against a fronto-parallel plane") {
    Pose<double> pose;
    pose.translation = Vector3<double>(1, 0, 0);
    const PlaneParams<double> plane(Vector3<double>(0, 0, 1), 2.0);
    const Homography<double> h = homography_from_pose_plane(pose, plane);
    Homography<double> expected = Homography<double>::Identity();
    expected(0, 2) = -0.5;
    CHECK((h - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("zero translation gives the identity for any plane") {
    const Pose<double> pose;
    const PlaneParams<double> plane(Vector3<double>(0.3, -0.2, -1.0), 4.0);
    CHECK(homography_from_pose_plane(pose, plane).isIdentity(0.0));
  }
}

// Brute-force transfer oracle: points constructed on the plane must map to
// the direct second-camera projection through H.
TEST_CASE("homography agrees with direct 3D projection on plane points") {
  const SimConfig cfg = default_scene_config(101);
  for_each_scene(cfg, 50, [](const SceneSample& scene) {
    SampleStream stream(splitmix64(scene.seed ^ 0x51ce));
    const Homography<double> h =
        homography_from_pose_plane(scene.pose, scene.plane);
    int checked = 0;
    while (checked < 20) {
      const Vector2<double> p1 = random_image_point(stream);
      const double slope = scene.plane.normal().dot(lift(p1));
      if (!(slope < -0.1)) continue;
      const double depth = -scene.plane.distance() / slope;
      if (depth < 0.5 || depth > 50.0) continue;
      const Vector3<double> x1 = depth * lift(p1);
      const Vector3<double> x2 =
          scene.pose.rotation * x1 + scene.pose.translation;
      if (x2.z() < 0.1) continue;
      ++checked;
      const Vector2<double> via_h = project((h * lift(p1)).eval());
      const Vector2<double> direct = project(x2);
      CHECK(max_abs_diff(via_h, direct) < 1e-9);
    }
  });
}

TEST_CASE("project dehomogenizes and rejects points at infinity") {
  CHECK(project(Vector3<double>(2, 4, 2)) == Vector2<double>(1, 2));
  const Vector2<double> p(0.37, -1.25);
  CHECK(project(lift(p)) == p);
  CHECK_THROWS_AS(project(Vector3<double>(1, 1, 0)), PointAtInfinity);
  CHECK_THROWS_AS(project(Vector3<double>(1, 1, 1e-13)), PointAtInfinity);
}

TEST_CASE("plane distance from point") {
  CHECK(plane_distance_from_point(Vector3<double>(0, 0, 1),
                                  Vector3<double>(0, 0, 5)) == -5.0);
  CHECK(plane_distance_from_point(Vector3<double>(0, 0, 1),
                                  Vector3<double>(3, -2, 5)) == -5.0);
  CHECK(plane_distance_from_point(Vector3<double>(0.6, 0, 0.8),
                                  Vector3<double>(1, 0, 1)) ==
        doctest::Approx(-1.4).epsilon(1e-12));
  // plane through the camera center
  CHECK_THROWS_AS(plane_distance_from_point(Vector3<double>(0, 0, 1),
                                            Vector3<double>(1, 1, 0)),
                  DegeneratePlane);
}

TEST_CASE("plane params normalize jointly and keep the plane fixed") {
  const Vector3<double> raw_normal(0, 0, 3);
  const double raw_d = -15.0;
  const PlaneParams<double> plane(raw_normal, raw_d);
  CHECK(plane.normal() == Vector3<double>(0, 0, 1));
  CHECK(plane.distance() == -5.0);
  // A point satisfying the raw implicit form still satisfies the stored one.
  const Vector3<double> on_plane(2, -1, 5);
  CHECK(std::abs(plane.normal().dot(on_plane) + plane.distance()) < 1e-12);

  CHECK_THROWS_AS(PlaneParams<double>(Vector3<double>(0, 0, 1), 0.0),
                  DegeneratePlane);
  CHECK_THROWS_AS(PlaneParams<double>(Vector3<double>(0, 0, 0), 1.0),
                  DegeneratePlane);
  CHECK_THROWS_AS(
      PlaneParams<double>(Vector3<double>(0, 0, 1),
                          std::numeric_limits<double>::quiet_NaN()),
      DegeneratePlane);
}

TEST_CASE("unit normal invariant holds after construction") {
  SampleStream stream(7);
  for (int i = 0; i < 100; ++i) {
    const Vector3<double> n = 5.0 * stream.unit_vector();
    const double d = stream.range(0.5, 10.0);
    const PlaneParams<double> plane(n, d);
    CHECK(std::abs(plane.normal().norm() - 1.0) < 1e-12);
    CHECK(std::abs(plane.distance()) > 0.0);
  }
}

TEST_CASE("pixel normalization") {
  SUBCASE("identity intrinsics are a no-op") {
    const Intrinsics<double> k;
    const Vector2<double> p(0.2, -0.7);
    CHECK(normalize_pixel(k, p) == p);
  }
  SUBCASE("principal point maps to the origin") {
    const Intrinsics<double> k{500, 500, 320, 240, 0};
    CHECK(normalize_pixel(k, Vector2<double>(320, 240)) ==
          Vector2<double>(0, 0));
    CHECK(normalize_pixel(k, Vector2<double>(820, 240)) ==
          Vector2<double>(1, 0));
  }
  SUBCASE("round trip over random intrinsics and pixels") {
    SampleStream stream(11);
    for (int i = 0; i < 1000; ++i) {
      Intrinsics<double> k;
      k.fx = stream.range(100, 2000);
      k.fy = stream.range(100, 2000);
      k.cx = stream.range(-50, 1000);
      k.cy = stream.range(-50, 1000);
      k.skew = stream.range(-5, 5);
      const double u = stream.range(-2000, 2000);
      const double v = stream.range(-2000, 2000);
      const Vector2<double> pixel(u, v);
      const Vector2<double> back = denormalize_pixel(k, normalize_pixel(k, pixel));
      CHECK(max_abs_diff(back, pixel) < 1e-12 * std::max(1.0, pixel.norm()));
      // agrees with the explicit K^-1 route
      const Vector2<double> via_inverse =
          project((k.matrix().inverse() * lift(pixel)).eval());
      CHECK(max_abs_diff(normalize_pixel(k, pixel), via_inverse) < 1e-10);
    }
  }
}

TEST_CASE("intrinsics validity") {
  Intrinsics<double> k{500, 480, 320, 240, 0.5};
  CHECK(k.valid());
  k.fx = 0.0;
  CHECK_FALSE(k.valid());
  k = Intrinsics<double>{};
  k.fy = -1.0;
  CHECK_FALSE(k.valid());
  k = Intrinsics<double>{};
  k.cx = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(k.valid());
}

TEST_CASE("essential matrix from pose") {
  SUBCASE("pure x translation") {
    Pose<double> pose;
    pose.translation = Vector3<double>(1, 0, 0);
    EssentialMatrix<double> expected;
    expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
    CHECK((essential_from_pose(pose) - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("zero translation is rejected") {
    CHECK_THROWS_AS(essential_from_pose(Pose<double>{}), ZeroTranslation);
  }
  SUBCASE("scaling the translation scales E and keeps the residual zero") {
    SampleStream stream(13);
    Pose<double> pose{rotation_about(Vector3<double>(0.2, 1, -0.3), 0.4),
                      Vector3<double>(0.3, -0.1, 0.2)};
    const EssentialMatrix<double> e1 = essential_from_pose(pose);
    Pose<double> scaled = pose;
    scaled.translation *= 5.0;
    const EssentialMatrix<double> e5 = essential_from_pose(scaled);
    CHECK((e5 - 5.0 * e1).cwiseAbs().maxCoeff() < 1e-15);
    for (int i = 0; i < 20; ++i) {
      const Vector2<double> p1 = random_image_point(stream);
      const Vector2<double> p2 = random_image_point(stream);
      CHECK(std::abs(epipolar_residual(e1, p1, p2) -
                     epipolar_residual(e5, p1, p2)) < 1e-12);
    }
  }
  SUBCASE("rank-2 invariant") {
    Pose<double> pose{rotation_about(Vector3<double>(1, 2, 3), 0.7),
                      Vector3<double>(0.4, 0.5, -0.6)};
    const Eigen::JacobiSVD<Matrix3<double>> svd(essential_from_pose(pose));
    CHECK(svd.singularValues()(2) <
          1e-9 * svd.singularValues()(0));
  }
}

// Correspondences induced by any plane satisfy the epipolar constraint.
TEST_CASE("epipolar residual vanishes on homography-transferred points") {
  const SimConfig cfg = default_scene_config(17);
  for_each_scene(cfg, 200, [](const SceneSample& scene) {
    if (scene.pose.translation.norm() <= kDegeneracyEps) return;
    const EssentialMatrix<double> e = essential_from_pose(scene.pose);
    const Homography<double> h =
        homography_from_pose_plane(scene.pose, scene.plane);
    for (const ScenePointSample& point : scene.points) {
      const Vector2<double> p2 = project((h * lift(point.p1)).eval());
      CHECK(epipolar_residual(e, point.p1, p2) < 1e-9);
      // epipolar lines through the transferred point
      CHECK(std::abs(epipolar_line_in_second(e, point.p1).dot(lift(p2))) <
            1e-9 * e.norm());
      CHECK(std::abs(epipolar_line_in_first(e, p2).dot(lift(point.p1))) <
            1e-9 * e.norm());
    }
  });
}

TEST_CASE("rotation matrix predicate") {
  CHECK(is_rotation_matrix(Matrix3<double>::Identity()));
  CHECK(is_rotation_matrix(rotation_about(Vector3<double>(1, -2, 0.5), 1.2)));
  CHECK_FALSE(is_rotation_matrix((2.0 * Matrix3<double>::Identity()).eval()));
  Matrix3<double> reflection = Matrix3<double>::Identity();
  reflection(2, 2) = -1.0;  // orthonormal but det = -1
  CHECK_FALSE(is_rotation_matrix(reflection));
  Matrix3<double> nan = Matrix3<double>::Identity();
  nan(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(is_rotation_matrix(nan));
  CHECK(is_valid_pose(Pose<double>{}));
  Pose<double> bad;
  bad.translation(0) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(is_valid_pose(bad));
}

TEST_CASE("pose composition matches homography composition") {
  const SimConfig cfg = default_scene_config(23);
  for_each_scene(cfg, 100, [](const SceneSample& scene) {
    SampleStream stream(splitmix64(scene.seed ^ 0xc0de));
    const Vector3<double> axis = stream.unit_vector();
    const double angle = stream.range(0.0, 0.3);
    const double t_norm = stream.range(0.0, 0.3);
    const Vector3<double> t_dir = stream.unit_vector();
    const Pose<double> hop{rotation_about(axis, angle), t_norm * t_dir};

    PlaneParams<double> plane2 = transform_plane(scene.pose, scene.plane);
    const Homography<double> h12 =
        homography_from_pose_plane(scene.pose, scene.plane);
    const Homography<double> h23 = homography_from_pose_plane(hop, plane2);
    const Homography<double> h13 =
        homography_from_pose_plane(compose(hop, scene.pose), scene.plane);
    CHECK((h23 * h12 - h13).cwiseAbs().maxCoeff() < 1e-12);
  });
}

TEST_CASE("transform_plane keeps points on the plane") {
  const Pose<double> pose{rotation_about(Vector3<double>(0, 1, 0), 0.5),
                          Vector3<double>(0.2, -0.1, 0.3)};
  const PlaneParams<double> plane(Vector3<double>(0.1, -0.2, -1.0), 3.0);
  const PlaneParams<double> plane2 = transform_plane(pose, plane);
  // take a point on the original plane
  const Vector3<double> x1 = intersect_ray_with_plane(plane, {0.1, 0.2});
  const Vector3<double> x2 = pose.rotation * x1 + pose.translation;
  CHECK(std::abs(plane2.normal().dot(x2) + plane2.distance()) < 1e-12);
}
