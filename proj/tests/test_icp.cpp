#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace mmr;
using mmr::test::random_cloud;
using mmr::test::random_pose;

namespace {

// Horn's closed-form absolute orientation: the optimal rotation is the eigenvector of the
// 4x4 symmetric matrix built from the cross-covariance with the largest eigenvalue.
HomogeneousTransform horn(const PointCloud& src, const PointCloud& dst) {
  const Point3 cs = src.centroid();
  const Point3 cd = dst.centroid();
  Matrix3 s = Matrix3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) s += (src[i] - cs) * (dst[i] - cd).transpose();
  Eigen::Matrix4d n;
  n << s(0, 0) + s(1, 1) + s(2, 2), s(1, 2) - s(2, 1), s(2, 0) - s(0, 2), s(0, 1) - s(1, 0),
      s(1, 2) - s(2, 1), s(0, 0) - s(1, 1) - s(2, 2), s(0, 1) + s(1, 0), s(2, 0) + s(0, 2),
      s(2, 0) - s(0, 2), s(0, 1) + s(1, 0), -s(0, 0) + s(1, 1) - s(2, 2), s(1, 2) + s(2, 1),
      s(0, 1) - s(1, 0), s(2, 0) + s(0, 2), s(1, 2) + s(2, 1), -s(0, 0) - s(1, 1) + s(2, 2);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(n);
  const Eigen::Vector4d q = es.eigenvectors().col(3);
  const Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  const Matrix3 r = quat.normalized().toRotationMatrix();
  return HomogeneousTransform(r, cd - r * cs);
}

}  // namespace

TEST_CASE("fit_rigid agrees with the quaternion solution") {
  CounterRng rng(1);
  for (int i = 0; i < 50; ++i) {
    const PointCloud src = random_cloud(rng, 40);
    std::vector<Point3> dst_pts;
    const HomogeneousTransform t(random_pose(rng));
    for (const auto& p : src) dst_pts.push_back(t * p + 0.05 * Point3(rng.normal(), rng.normal(), rng.normal()));
    const PointCloud dst(dst_pts);
    const auto fitted = fit_rigid(src.points(), dst.points());
    REQUIRE(fitted);
    CHECK((fitted->matrix() - horn(src, dst).matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("fit_rigid reports rank deficiency") {
  std::vector<Point3> line;
  for (int i = 0; i < 10; ++i) line.emplace_back(i, 2 * i, 0);
  CHECK_FALSE(fit_rigid(line, line).has_value());
  CHECK_THROWS_AS(fit_rigid(line, std::span<const Point3>(line).first(3)), InvalidInput);
}

TEST_CASE("ICP on aligned clouds stays at the identity") {
  const PointCloud cloud = make_shape("box_surface", 400, 1);
  const RegistrationReport r = icp_baseline(cloud, cloud, 100, 1e-12, Pose::identity(), Pose::identity(), 1);
  CHECK(*r.translation_error < 1e-10);
  CHECK(*r.rotation_error < 1e-10);
  CHECK(r.converged);
  CHECK_FALSE(r.failure.has_value());
}

TEST_CASE("ICP recovers a small rotation exactly") {
  const PointCloud target = make_shape("torus_surface", 800, 2);
  const Pose truth{deg2rad(2.0), 0, 0, 0, 0, 0};
  const RegistrationReport r = icp_baseline(apply(inverse(truth), target), target, 100, 1e-12, Pose::identity(), truth, 1);
  CHECK(rad2deg(*r.rotation_error) < 1e-6);
  CHECK(*r.translation_error < 1e-8);
}

TEST_CASE("ICP records its failure modes") {
  SUBCASE("collinear input") {
    std::vector<Point3> line;
    for (int i = 0; i < 20; ++i) line.emplace_back(0.1 * i, 0, 0);
    const RegistrationReport r = icp_baseline(PointCloud(line), PointCloud(line), 10, 1e-12, Pose::identity(), std::nullopt, 1);
    CHECK(r.failure.has_value());
    CHECK_FALSE(r.converged);
  }
  SUBCASE("half-turn initial offset on an elongated shape") {
    const PointCloud target = make_shape("two_blobs", 600, 3);
    const Pose truth{deg2rad(180.0), 0, 0, 0, 0, 0};
    const RegistrationReport r = icp_baseline(apply(inverse(truth), target), target, 100, 1e-12, Pose::identity(), truth, 1);
    CHECK(rad2deg(*r.rotation_error) > 90.0);
  }
}
