#include <mmr/kernel_moments.hpp>

#include <cmath>
#include <cstring>
#include <string>

#include <Eigen/SVD>

namespace mmr {

namespace {

std::uint64_t fingerprint(std::span<const Point3> centers, double sigma) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto feed = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001B3ull;
    }
  };
  feed(static_cast<double>(centers.size()));
  for (const auto& c : centers) {
    feed(c.x());
    feed(c.y());
    feed(c.z());
  }
  feed(sigma);
  return h;
}

void require_nonempty(const PointCloud& cloud, const char* what) {
  if (cloud.empty()) throw InvalidInput(std::string(what) + ": point cloud is empty");
}

// Running sums for one center: phi, phi * d, and phi * d . (dR/dpsi_j x) where d = p - c.
struct GradientSums {
  double phi = 0.0;
  double phi_d[3] = {0.0, 0.0, 0.0};
  double phi_rot[3] = {0.0, 0.0, 0.0};

  GradientSums& operator+=(const GradientSums& o) {
    phi += o.phi;
    for (int j = 0; j < 3; ++j) {
      phi_d[j] += o.phi_d[j];
      phi_rot[j] += o.phi_rot[j];
    }
    return *this;
  }
};

}  // namespace

KernelBasis::KernelBasis(std::vector<Point3> centers, double sigma, Validation validation)
    : centers_(std::move(centers)), sigma_(sigma), inv_sigma2_(0.0), id_(0) {
  if (!std::isfinite(sigma_) || sigma_ <= 0.0) {
    throw InvalidInput("KernelBasis: sigma must be positive and finite, got " + std::to_string(sigma_));
  }
  if (centers_.empty()) throw InvalidInput("KernelBasis: no centers");
  for (const auto& c : centers_) {
    if (!c.allFinite()) throw InvalidInput("KernelBasis: non-finite center");
  }
  if (validation == Validation::full) require_non_coplanar(centers_, "KernelBasis");
  inv_sigma2_ = 1.0 / (sigma_ * sigma_);
  id_ = fingerprint(centers_, sigma_);
}

bool is_non_coplanar(std::span<const Point3> points) {
  if (points.size() < 4) return false;
  Point3 mean = Point3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Eigen::MatrixX3d centered(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) centered.row(static_cast<Eigen::Index>(i)) = (points[i] - mean).transpose();
  const Eigen::Vector3d s = Eigen::JacobiSVD<Eigen::MatrixX3d>(centered).singularValues();
  return s[0] > 0.0 && s[2] > 1e-9 * s[0];
}

void require_non_coplanar(std::span<const Point3> points, const char* context) {
  if (points.size() < 4) {
    throw DegenerateGeometry(std::string(context) + ": need at least 4 non-coplanar centers for an injective kernel map, got " +
                             std::to_string(points.size()));
  }
  if (!is_non_coplanar(points)) {
    throw DegenerateGeometry(std::string(context) +
                             ": centers lie in a single plane, so the kernel map is not injective");
  }
}

double kernel_eval(const KernelBasis& basis, std::size_t k, const Point3& p) {
  if (k >= basis.size()) throw InvalidInput("kernel_eval: center index out of range");
  const double a = (p - basis.center(k)).squaredNorm() * basis.inv_sigma2();
  return a > kFlushExponent ? 0.0 : std::exp(-a);
}

Eigen::VectorXd kernel_vector(const KernelBasis& basis, const Point3& p) {
  Eigen::VectorXd phi(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) phi[static_cast<Eigen::Index>(k)] = kernel_eval(basis, k, p);
  return phi;
}

MomentVector empirical_moments(const KernelBasis& basis, const PointCloud& cloud, std::size_t workers) {
  require_nonempty(cloud, "empirical_moments");
  const auto points = cloud.points();
  const double inv_s2 = basis.inv_sigma2();
  const double inv_n = 1.0 / static_cast<double>(points.size());

  MomentVector out;
  out.basis_id = basis.id();
  out.values.resize(basis.size());
  parallel_for(basis.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Point3 c = basis.center(k);
      const double sum = pairwise_sum<double>(0, points.size(), [&](std::size_t i) {
        const double a = (points[i] - c).squaredNorm() * inv_s2;
        return a > kFlushExponent ? 0.0 : std::exp(-a);
      });
      out.values[k] = sum * inv_n;
    }
  });
  return out;
}

TransformedMoments transformed_moments(const KernelBasis& basis, const PointCloud& cloud, const Pose& pose,
                                       std::size_t workers) {
  require_nonempty(cloud, "transformed_moments");
  if (!pose.is_finite()) throw InvalidInput("transformed_moments: pose is not finite");

  const std::size_t n = cloud.size();
  const Matrix3 r = rotation_matrix(pose);
  const Point3 t = pose.translation();
  const auto dr = rotation_jacobian(pose);

  // Transformed points and the rotational tangent directions (dR/dpsi_j) x are shared by all centers.
  std::vector<Point3> moved(n);
  std::vector<std::array<Point3, 3>> tangents(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& x = cloud[i];
    moved[i] = r * x + t;
    tangents[i] = {dr[0] * x, dr[1] * x, dr[2] * x};
  }

  const double inv_s2 = basis.inv_sigma2();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double scale = -2.0 * inv_s2 * inv_n;

  TransformedMoments out;
  out.moments.basis_id = basis.id();
  out.moments.values.resize(basis.size());
  out.jacobian.resize(static_cast<Eigen::Index>(basis.size()), 6);

  parallel_for(basis.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Point3 c = basis.center(k);
      const GradientSums s = pairwise_sum<GradientSums>(0, n, [&](std::size_t i) {
        GradientSums term;
        const Point3 d = moved[i] - c;
        const double a = d.squaredNorm() * inv_s2;
        if (a > kFlushExponent) return term;
        const double phi = std::exp(-a);
        term.phi = phi;
        for (int j = 0; j < 3; ++j) {
          term.phi_d[j] = phi * d[j];
          term.phi_rot[j] = phi * d.dot(tangents[i][static_cast<std::size_t>(j)]);
        }
        return term;
      });
      const auto row = static_cast<Eigen::Index>(k);
      out.moments.values[k] = s.phi * inv_n;
      for (int j = 0; j < 3; ++j) {
        out.jacobian(row, j) = scale * s.phi_rot[j];
        out.jacobian(row, 3 + j) = scale * s.phi_d[j];
      }
    }
  });
  return out;
}

MomentJacobian moment_gradient(const KernelBasis& basis, const PointCloud& cloud, const Pose& pose,
                               std::size_t workers) {
  return transformed_moments(basis, cloud, pose, workers).jacobian;
}

}  // namespace mmr
