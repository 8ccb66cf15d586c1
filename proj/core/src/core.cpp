#include <mmr/core.hpp>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace mmr {

namespace {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

void require_nonempty(const PointCloud& cloud, const char* what) {
  if (cloud.empty()) throw InvalidInput(std::string(what) + ": point cloud is empty");
}

}  // namespace

PointCloud::PointCloud(std::vector<Point3> points, std::optional<std::string> frame_label)
    : points_(std::move(points)), frame_label_(std::move(frame_label)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw InvalidInput("PointCloud: point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

Point3 PointCloud::min_corner() const {
  require_nonempty(*this, "min_corner");
  Point3 m = points_.front();
  for (const auto& p : points_) m = m.cwiseMin(p);
  return m;
}

Point3 PointCloud::max_corner() const {
  require_nonempty(*this, "max_corner");
  Point3 m = points_.front();
  for (const auto& p : points_) m = m.cwiseMax(p);
  return m;
}

double PointCloud::bbox_diagonal() const { return (max_corner() - min_corner()).norm(); }

Point3 PointCloud::centroid() const {
  require_nonempty(*this, "centroid");
  Point3 c = Point3::Zero();
  for (const auto& p : points_) c += p;
  return c / static_cast<double>(points_.size());
}

Pose Pose::from_vector(const Vector6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

Vector6 Pose::to_vector() const {
  Vector6 v;
  v << yaw, pitch, roll, tx, ty, tz;
  return v;
}

bool Pose::is_finite() const { return to_vector().allFinite(); }

Pose Pose::wrapped() const {
  Pose p = *this;
  p.yaw = wrap_angle(yaw);
  p.pitch = wrap_angle(pitch);
  p.roll = wrap_angle(roll);
  return p;
}

Matrix3 rotation_matrix(const Pose& pose) {
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
  Matrix3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp,     cp * sr,                cp * cr;
  return r;
}

std::array<Matrix3, 3> rotation_jacobian(const Pose& pose) {
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);

  Matrix3 d_yaw;
  d_yaw << -sy * cp, -sy * sp * sr - cy * cr, -sy * sp * cr + cy * sr,
            cy * cp,  cy * sp * sr - sy * cr,  cy * sp * cr + sy * sr,
            0.0,      0.0,                     0.0;
  Matrix3 d_pitch;
  d_pitch << -cy * sp, cy * cp * sr, cy * cp * cr,
             -sy * sp, sy * cp * sr, sy * cp * cr,
             -cp,      -sp * sr,     -sp * cr;
  Matrix3 d_roll;
  d_roll << 0.0, cy * sp * cr + sy * sr, -cy * sp * sr + sy * cr,
            0.0, sy * sp * cr - cy * sr, -sy * sp * sr - cy * cr,
            0.0, cp * cr,                -cp * sr;
  return {d_yaw, d_pitch, d_roll};
}

Eigen::Vector3d euler_zyx(const Matrix3& r) {
  const double cos_pitch = std::hypot(r(0, 0), r(1, 0));
  const double pitch = std::atan2(-r(2, 0), cos_pitch);
  if (cos_pitch < 1e-10) {
    // Gimbal lock: only yaw - roll (or yaw + roll) is observable.
    return {std::atan2(-r(0, 1), r(1, 1)), pitch, 0.0};
  }
  return {std::atan2(r(1, 0), r(0, 0)), pitch, std::atan2(r(2, 1), r(2, 2))};
}

HomogeneousTransform::HomogeneousTransform(const Pose& pose)
    : HomogeneousTransform(rotation_matrix(pose), pose.translation()) {}

HomogeneousTransform::HomogeneousTransform(const Matrix3& rotation, const Point3& translation)
    : matrix_(Matrix4::Identity()) {
  matrix_.topLeftCorner<3, 3>() = rotation;
  matrix_.topRightCorner<3, 1>() = translation;
}

HomogeneousTransform HomogeneousTransform::from_matrix(const Matrix4& m, double tolerance) {
  if (!m.allFinite()) throw InvalidInput("HomogeneousTransform: non-finite matrix");
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw InvalidInput("HomogeneousTransform: bottom row must be [0 0 0 1]");
  }
  const Matrix3 r = m.topLeftCorner<3, 3>();
  if (!(r.transpose() * r).isIdentity(tolerance) || std::abs(r.determinant() - 1.0) > tolerance) {
    throw InvalidInput("HomogeneousTransform: rotation block is not in SO(3)");
  }
  HomogeneousTransform t;
  t.matrix_ = m;
  return t;
}

Pose HomogeneousTransform::to_pose() const {
  const Eigen::Vector3d e = euler_zyx(rotation());
  const Point3 t = translation();
  return {e[0], e[1], e[2], t.x(), t.y(), t.z()};
}

HomogeneousTransform compose(const HomogeneousTransform& a, const HomogeneousTransform& b) {
  const Matrix3 ra = a.rotation();
  return HomogeneousTransform(ra * b.rotation(), ra * b.translation() + a.translation());
}

HomogeneousTransform inverse(const HomogeneousTransform& t) {
  const Matrix3 rt = t.rotation().transpose();
  return HomogeneousTransform(rt, -rt * t.translation());
}

Pose inverse(const Pose& pose) { return inverse(HomogeneousTransform(pose)).to_pose(); }

PointCloud apply(const HomogeneousTransform& transform, const PointCloud& cloud) {
  require_nonempty(cloud, "apply");
  const Matrix3 r = transform.rotation();
  const Point3 t = transform.translation();
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.emplace_back(r * p + t);
  return PointCloud(std::move(out), cloud.frame_label());
}

PointCloud apply(const Pose& pose, const PointCloud& cloud) { return apply(HomogeneousTransform(pose), cloud); }

double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace mmr
