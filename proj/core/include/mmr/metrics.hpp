#pragma once

#include <mmr/core.hpp>

namespace mmr {

struct ErrorPair {
  double translation_error = 0.0;  ///< meters
  double rotation_error = 0.0;     ///< radians, in [0, pi]

  double rotation_error_deg() const { return rad2deg(rotation_error); }
};

/// With D = inverse(mat(truth)) * mat(estimate): translation error is |t_D| and rotation
/// error is arccos((trace(R_D) - 1) / 2), the argument clamped to [-1, 1].
ErrorPair pose_errors(const Pose& truth, const Pose& estimate);
ErrorPair pose_errors(const HomogeneousTransform& truth, const HomogeneousTransform& estimate);

/// Rotation angle of R, arccos((trace(R) - 1) / 2) with clamping.
double rotation_angle(const Matrix3& rotation);

}  // namespace mmr
