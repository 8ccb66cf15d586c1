#include <mmr/icp.hpp>

#include <chrono>
#include <limits>

#include <Eigen/Dense>

#include <mmr/metrics.hpp>

namespace mmr {

std::optional<HomogeneousTransform> fit_rigid(std::span<const Point3> src, std::span<const Point3> dst) {
  if (src.size() != dst.size() || src.empty()) throw InvalidInput("fit_rigid: point sets must be nonempty and paired");
  const double inv_n = 1.0 / static_cast<double>(src.size());
  Point3 mean_src = Point3::Zero();
  Point3 mean_dst = Point3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mean_src += src[i];
    mean_dst += dst[i];
  }
  mean_src *= inv_n;
  mean_dst *= inv_n;

  Matrix3 cov = Matrix3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) cov += (src[i] - mean_src) * (dst[i] - mean_dst).transpose();

  const Eigen::JacobiSVD<Matrix3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  if (!(s[0] > 0.0) || s[2] <= 1e-12 * s[0]) return std::nullopt;

  const Matrix3 u = svd.matrixU();
  const Matrix3 v = svd.matrixV();
  Matrix3 fix = Matrix3::Identity();
  fix(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Matrix3 r = v * fix * u.transpose();
  return HomogeneousTransform(r, mean_dst - r * mean_src);
}

RegistrationReport icp_baseline(const PointCloud& source, const PointCloud& target, int max_iters, double tol,
                                const Pose& init, const std::optional<Pose>& truth, std::size_t workers) {
  if (source.empty() || target.empty()) throw InvalidInput("icp_baseline: point clouds must be nonempty");
  if (max_iters < 1) throw InvalidInput("icp_baseline: max_iters must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  const auto src = source.points();
  const auto tgt = target.points();
  std::vector<Point3> matched(src.size());
  std::vector<double> dist2(src.size());

  RegistrationReport report;
  HomogeneousTransform current(init);
  for (int iter = 0; iter < max_iters; ++iter) {
    const Matrix3 r = current.rotation();
    const Point3 t = current.translation();
    parallel_for(src.size(), workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const Point3 p = r * src[i] + t;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < tgt.size(); ++j) {
          const double d2 = (p - tgt[j]).squaredNorm();
          if (d2 < best) {
            best = d2;
            best_j = j;
          }
        }
        matched[i] = tgt[best_j];
        dist2[i] = best;
      }
    });
    double mse = 0.0;
    for (double d : dist2) mse += d;
    report.final_loss = mse / static_cast<double>(src.size());
    report.loss_history.push_back(report.final_loss);

    const auto fitted = fit_rigid(src, matched);
    if (!fitted) {
      report.failure = "rank-deficient cross-covariance";
      break;
    }
    const double change = (fitted->matrix() - current.matrix()).norm();
    current = *fitted;
    report.iterations = iter + 1;
    if (change < tol) {
      report.converged = true;
      break;
    }
  }

  report.estimated_pose = current.to_pose().wrapped();
  report.evaluations = report.iterations;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (truth) {
    const ErrorPair e = pose_errors(*truth, report.estimated_pose);
    report.translation_error = e.translation_error;
    report.rotation_error = e.rotation_error;
  }
  return report;
}

}  // namespace mmr
