#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <mmr/core.hpp>
#include <mmr/parallel.hpp>

namespace mmr {

/// Gaussian RBF kernels phi_k(x) = exp(-|x - c_k|^2 / sigma^2) sharing one isotropic width.
///
/// With full validation the basis has at least 4 centers that do not lie in a common
/// plane; that is what makes the kernel vector Phi(x) = (phi_1(x), ..., phi_K(x))
/// injective, and hence what lets equal moments pin down the transform.
class KernelBasis {
public:
  enum class Validation {
    full,        ///< >= 4 non-coplanar centers, sigma > 0
    sigma_only,  ///< >= 1 center, sigma > 0; for diagnostics and single-kernel studies
  };

  KernelBasis(std::vector<Point3> centers, double sigma, Validation validation = Validation::full);

  std::size_t size() const noexcept { return centers_.size(); }
  std::span<const Point3> centers() const noexcept { return centers_; }
  const Point3& center(std::size_t k) const { return centers_[k]; }
  double sigma() const noexcept { return sigma_; }
  double inv_sigma2() const noexcept { return inv_sigma2_; }

  /// Content fingerprint of (centers, sigma). Copies share it; any change to the data changes it.
  std::uint64_t id() const noexcept { return id_; }

private:
  std::vector<Point3> centers_;
  double sigma_;
  double inv_sigma2_;
  std::uint64_t id_;
};

/// Empirical moments of one cloud under one basis.
struct MomentVector {
  std::vector<double> values;
  std::uint64_t basis_id = 0;

  std::size_t size() const noexcept { return values.size(); }
};

/// Kernel exponents above this value give phi < 1e-300 and are flushed to zero.
inline constexpr double kFlushExponent = 690.77552789821370;

/// Throws DegenerateGeometry unless there are >= 4 points whose centered matrix has
/// rank 3 (smallest singular value > 1e-9 times the largest).
void require_non_coplanar(std::span<const Point3> points, const char* context);
bool is_non_coplanar(std::span<const Point3> points);

/// phi_k(p) for a 0-based center index k.
double kernel_eval(const KernelBasis& basis, std::size_t k, const Point3& p);

/// All kernel values at one point.
Eigen::VectorXd kernel_vector(const KernelBasis& basis, const Point3& p);

/// m_k = mean_j phi_k(y_j). Parallel over centers; each center's sum uses a fixed pairwise
/// tree, so the result is bitwise identical for every worker count.
MomentVector empirical_moments(const KernelBasis& basis, const PointCloud& cloud,
                               std::size_t workers = default_workers());

using MomentJacobian = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor>;

/// Moments of the transformed cloud T(cloud; pose) and their Jacobian with respect to
/// (yaw, pitch, roll, tx, ty, tz), computed in one pass.
struct TransformedMoments {
  MomentVector moments;
  MomentJacobian jacobian;
};

TransformedMoments transformed_moments(const KernelBasis& basis, const PointCloud& cloud, const Pose& pose,
                                       std::size_t workers = default_workers());

/// Row k holds d m_k(T(cloud; pose)) / d(yaw, pitch, roll, tx, ty, tz).
MomentJacobian moment_gradient(const KernelBasis& basis, const PointCloud& cloud, const Pose& pose,
                               std::size_t workers = default_workers());

}  // namespace mmr
