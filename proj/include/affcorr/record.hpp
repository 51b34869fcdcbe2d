#pragma once

#include <optional>

#include "affcorr/types.hpp"

namespace affcorr {

// One line of work for the batch tools: scene description plus whatever a
// stage has attached so far. Wire format is one JSON object per line with
// matrices stored row-major (see record_io.hpp).
struct CorrespondenceRecord {
  Matrix3<double> rotation = Matrix3<double>::Identity();  // "R", 9 numbers
  Vector3<double> translation = Vector3<double>::Zero();   // "t"
  std::optional<Vector3<double>> normal;                   // "n"
  std::optional<double> distance;                          // "d"
  Vector2<double> p1 = Vector2<double>::Zero();            // "p1"
  std::optional<Vector2<double>> p2;                       // "p2"
  std::optional<Matrix2<double>> affine;                   // "A", row-major
  std::optional<double> s;                                 // "s"
  std::optional<double> residual;                          // "residual"

  // estimate-normal outputs; ground-truth n/d above stay untouched.
  std::optional<Vector3<double>> normal_est;               // "n_est"
  std::optional<double> distance_est;                      // "d_est"
  std::optional<double> conditioning;                      // "conditioning"
  std::optional<double> normal_error_rad;                  // "n_err_rad"
  std::optional<double> distance_error_rel;                // "d_err_rel"
};

}  // namespace affcorr
