#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "affcorr/geometry.hpp"
#include "affcorr/record.hpp"
#include "affcorr/types.hpp"

namespace affcorr {

struct SimConfig {
  std::uint64_t seed = 0;
  int scene_count = 10;
  int points_per_scene = 5;
  double rotation_bound_rad = 0.5;       // axis-angle magnitude bound
  double translation_bound = 1.0;        // bound on ||t||
  double depth_min = 2.0;                // ray-plane intersection depths
  double depth_max = 10.0;
  double normal_cone_half_angle_rad = 0.6;  // max angle between -n and +z
};

// Throws InvalidConfig on out-of-range settings.
void validate(const SimConfig& cfg);

struct ScenePointSample {
  Vector3<double> x;    // on the plane, positive depth in both views
  Vector2<double> p1;
  Vector2<double> p2;
};

struct SceneSample {
  Pose<double> pose;
  PlaneParams<double> plane;
  std::vector<ScenePointSample> points;
  std::uint64_t seed;   // per-scene seed actually fed to the generator
};

// SplitMix64 step; used to derive independent per-scene seeds so scene
// indices can be generated concurrently in any order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t scene_seed(std::uint64_t seed, std::uint64_t index);

// Deterministic ladder of uniform draws on top of std::mt19937_64. The engine
// is fully specified by the standard and doubles are formed as
// (x >> 11) * 2^-53, so a (seed, index) pair pins the sample stream exactly;
// std::*_distribution is avoided on purpose.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

  double unit();                          // [0, 1)
  double range(double lo, double hi);
  double gaussian();                      // Box-Muller from two uniforms
  Vector3<double> unit_vector();
  // Unit vector whose angle to -z is at most half_angle (uniform in solid
  // angle); the simulator's plane normals face the first camera.
  Vector3<double> cone_about_minus_z(double half_angle);
  Matrix3<double> rotation(double max_angle_rad);

 private:
  std::mt19937_64 engine_;
};

// Rejection-samples a scene until pose, plane and all points satisfy the
// validity bounds (positive depth in both views, depth within range, s > 0.1,
// second-view point inside a sane field of view). Deterministic in
// (cfg.seed, index); throws ExhaustedRejection after 10^4 scene attempts.
SceneSample generate_scene(const SimConfig& cfg, std::uint64_t index);

// One record per point: pose, plane, both projections and the ground-truth
// affine map.
std::vector<CorrespondenceRecord> scene_to_records(const SceneSample& scene);

}  // namespace affcorr
