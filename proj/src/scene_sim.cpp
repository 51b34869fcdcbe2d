#include "affcorr/scene_sim.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Geometry>

#include "affcorr/affine.hpp"
#include "affcorr/errors.hpp"

namespace affcorr {

namespace {

constexpr int kMaxSceneAttempts = 10'000;
constexpr int kMaxPointTries = 200;
constexpr double kMinPlaneDistance = 0.1;   // keeps 1/d terms well scaled
constexpr double kMinDenominator = 0.1;     // SceneSample invariant on s
constexpr double kImageBoxHalfWidth = 0.5;  // first-view sampling window
constexpr double kSecondViewBound = 1.5;    // reject points leaving the FOV
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.scene_count < 0 || cfg.points_per_scene < 0)
    throw InvalidConfig("scene and point counts must be non-negative");
  if (!(cfg.rotation_bound_rad >= 0.0) || !(cfg.translation_bound >= 0.0))
    throw InvalidConfig("pose bounds must be non-negative");
  if (!(cfg.depth_min > 0.1) || !(cfg.depth_max < 100.0) ||
      !(cfg.depth_min <= cfg.depth_max))
    throw InvalidConfig("depth range must satisfy 0.1 < min <= max < 100");
  if (!(cfg.normal_cone_half_angle_rad >= 0.0) ||
      !(cfg.normal_cone_half_angle_rad <= 1.2))
    throw InvalidConfig("normal cone half-angle must lie in [0, 1.2] rad");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t scene_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

double SampleStream::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SampleStream::range(double lo, double hi) {
  return lo + (hi - lo) * unit();
}

double SampleStream::gaussian() {
  const double u1 = 1.0 - unit();  // (0, 1], keeps the log finite
  const double u2 = unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Vector3<double> SampleStream::unit_vector() {
  const double z = range(-1.0, 1.0);
  const double phi = range(0.0, kTwoPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Vector3<double> SampleStream::cone_about_minus_z(double half_angle) {
  const double cos_theta = range(std::cos(half_angle), 1.0);
  const double phi = range(0.0, kTwoPi);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const Vector3<double> toward_camera(sin_theta * std::cos(phi),
                                      sin_theta * std::sin(phi), cos_theta);
  return -toward_camera;
}

Matrix3<double> SampleStream::rotation(double max_angle_rad) {
  const Vector3<double> axis = unit_vector();
  const double angle = range(0.0, max_angle_rad);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

namespace {

struct PointDraw {
  bool ok = false;
  ScenePointSample sample;
};

// Draw order is explicit everywhere below: the sample stream is part of the
// reproducibility contract, so no two draws may sit in one expression where
// evaluation order is unspecified.
Vector2<double> draw_image_point(SampleStream& stream) {
  const double u = stream.range(-kImageBoxHalfWidth, kImageBoxHalfWidth);
  const double v = stream.range(-kImageBoxHalfWidth, kImageBoxHalfWidth);
  return {u, v};
}

PointDraw draw_point(SampleStream& stream, const Pose<double>& pose,
                     const PlaneParams<double>& plane, const SimConfig& cfg) {
  PointDraw out;
  const Vector2<double> p1 = draw_image_point(stream);
  const Vector3<double> ray = lift(p1);
  const double slope = plane.normal().dot(ray);
  if (!(slope < 0.0)) return out;  // d > 0: visibility needs n.ray < 0
  const double depth = -plane.distance() / slope;
  if (depth < cfg.depth_min || depth > cfg.depth_max) return out;

  double s = 0.0;
  try {
    s = denominator_s(pose, plane, p1);
  } catch (const DegenerateDenominator&) {
    return out;
  }
  if (!(s > kMinDenominator)) return out;  // also enforces positive z2 = s*depth

  const Vector3<double> x1 = depth * ray;
  const Vector3<double> x2 = pose.rotation * x1 + pose.translation;
  if (!(x2.z() > 0.0)) return out;
  const Vector2<double> p2(x2.x() / x2.z(), x2.y() / x2.z());
  if (p2.cwiseAbs().maxCoeff() > kSecondViewBound) return out;

  out.ok = true;
  out.sample = {x1, p1, p2};
  return out;
}

}  // namespace

SceneSample generate_scene(const SimConfig& cfg, std::uint64_t index) {
  validate(cfg);
  const std::uint64_t derived = scene_seed(cfg.seed, index);
  SampleStream stream(derived);

  for (int attempt = 0; attempt < kMaxSceneAttempts; ++attempt) {
    const Matrix3<double> rotation = stream.rotation(cfg.rotation_bound_rad);
    const double t_norm = stream.range(0.0, cfg.translation_bound);
    const Vector3<double> t_dir = stream.unit_vector();
    Pose<double> pose{rotation, t_norm * t_dir};

    const Vector3<double> normal =
        stream.cone_about_minus_z(cfg.normal_cone_half_angle_rad);
    const double anchor_depth = stream.range(cfg.depth_min, cfg.depth_max);
    const Vector3<double> anchor = anchor_depth * lift(draw_image_point(stream));
    double d = 0.0;
    try {
      d = plane_distance_from_point(normal, anchor);
    } catch (const DegeneratePlane&) {
      continue;
    }
    if (!(d > kMinPlaneDistance)) continue;
    const PlaneParams<double> plane(normal, d);

    std::vector<ScenePointSample> points;
    points.reserve(static_cast<std::size_t>(cfg.points_per_scene));
    bool scene_ok = true;
    for (int k = 0; k < cfg.points_per_scene && scene_ok; ++k) {
      bool point_ok = false;
      for (int tries = 0; tries < kMaxPointTries; ++tries) {
        PointDraw draw = draw_point(stream, pose, plane, cfg);
        if (draw.ok) {
          points.push_back(draw.sample);
          point_ok = true;
          break;
        }
      }
      scene_ok = point_ok;
    }
    if (!scene_ok) continue;

    return SceneSample{std::move(pose), plane, std::move(points), derived};
  }
  throw ExhaustedRejection(
      "no valid scene found; the configuration is infeasible");
}

std::vector<CorrespondenceRecord> scene_to_records(const SceneSample& scene) {
  std::vector<CorrespondenceRecord> records;
  records.reserve(scene.points.size());
  for (const ScenePointSample& point : scene.points) {
    const AffineResult<double> result =
        affine_elementwise(scene.pose, scene.plane, point.p1);
    CorrespondenceRecord record;
    record.rotation = scene.pose.rotation;
    record.translation = scene.pose.translation;
    record.normal = scene.plane.normal();
    record.distance = scene.plane.distance();
    record.p1 = point.p1;
    record.p2 = point.p2;
    record.affine = result.affine;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace affcorr
