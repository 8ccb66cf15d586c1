#include <mmr/metrics.hpp>

#include <algorithm>
#include <cmath>

namespace mmr {

double rotation_angle(const Matrix3& rotation) {
  const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

ErrorPair pose_errors(const HomogeneousTransform& truth, const HomogeneousTransform& estimate) {
  const HomogeneousTransform delta = compose(inverse(truth), estimate);
  return {delta.translation().norm(), rotation_angle(delta.rotation())};
}

ErrorPair pose_errors(const Pose& truth, const Pose& estimate) {
  return pose_errors(HomogeneousTransform(truth), HomogeneousTransform(estimate));
}

}  // namespace mmr
