#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <mmr/error.hpp>

namespace mmr {

using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Ordered set of 3D points in meters. Every point is finite.
class PointCloud {
public:
  PointCloud() = default;
  /// Throws InvalidInput if any coordinate is NaN or infinite.
  explicit PointCloud(std::vector<Point3> points, std::optional<std::string> frame_label = std::nullopt);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  const Point3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point3> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  const std::optional<std::string>& frame_label() const noexcept { return frame_label_; }
  void set_frame_label(std::optional<std::string> label) { frame_label_ = std::move(label); }

  /// Axis-aligned bounding box. Requires a nonempty cloud.
  Point3 min_corner() const;
  Point3 max_corner() const;
  double bbox_diagonal() const;
  Point3 centroid() const;

private:
  std::vector<Point3> points_;
  std::optional<std::string> frame_label_;
};

/// Rigid transform as intrinsic Z-Y-X Euler angles (radians) and a translation (meters).
/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct Pose {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double tz = 0.0;

  static Pose identity() { return {}; }
  /// Ordering (yaw, pitch, roll, tx, ty, tz); the optimizer's parameter vector.
  static Pose from_vector(const Vector6& v);
  Vector6 to_vector() const;
  Point3 translation() const { return {tx, ty, tz}; }
  bool is_finite() const;

  /// Angles wrapped to (-pi, pi]; the same rotation.
  Pose wrapped() const;
};

Matrix3 rotation_matrix(const Pose& pose);

/// Partial derivatives of rotation_matrix with respect to yaw, pitch and roll.
std::array<Matrix3, 3> rotation_jacobian(const Pose& pose);

/// Z-Y-X Euler angles of a rotation matrix. At pitch = +-pi/2 roll is set to 0
/// and the remaining rotation about z is folded into yaw.
Eigen::Vector3d euler_zyx(const Matrix3& rotation);

/// 4x4 rigid transform [[R, t], [0, 1]].
class HomogeneousTransform {
public:
  HomogeneousTransform() : matrix_(Matrix4::Identity()) {}
  explicit HomogeneousTransform(const Pose& pose);
  HomogeneousTransform(const Matrix3& rotation, const Point3& translation);
  /// Validates orthogonality (det +1) within `tolerance` and an exact [0 0 0 1] bottom row.
  static HomogeneousTransform from_matrix(const Matrix4& m, double tolerance = 1e-12);

  static HomogeneousTransform identity() { return {}; }

  const Matrix4& matrix() const noexcept { return matrix_; }
  Matrix3 rotation() const { return matrix_.topLeftCorner<3, 3>(); }
  Point3 translation() const { return matrix_.topRightCorner<3, 1>(); }
  Point3 operator*(const Point3& p) const { return rotation() * p + translation(); }

  Pose to_pose() const;

private:
  Matrix4 matrix_;
};

/// Matrix product a * b: applies b first, then a.
HomogeneousTransform compose(const HomogeneousTransform& a, const HomogeneousTransform& b);
HomogeneousTransform inverse(const HomogeneousTransform& t);
Pose inverse(const Pose& pose);

/// Transforms every point. Throws InvalidInput on an empty cloud.
PointCloud apply(const Pose& pose, const PointCloud& cloud);
PointCloud apply(const HomogeneousTransform& transform, const PointCloud& cloud);

double rad2deg(double rad);
double deg2rad(double deg);

}  // namespace mmr
