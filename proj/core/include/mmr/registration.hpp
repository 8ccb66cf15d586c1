#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <mmr/bfgs.hpp>
#include <mmr/centers.hpp>
#include <mmr/core.hpp>
#include <mmr/kernel_moments.hpp>
#include <mmr/parallel.hpp>

namespace mmr {

struct MmrConfig {
  /// Kernel width as a fraction of the target's bounding-box diagonal.
  double sigma_scale = 0.05;
  /// Absolute kernel width in meters; overrides sigma_scale when set.
  std::optional<double> sigma;
  CenterConfig center_cfg;
  int max_iters = 200;
  double grad_tol = 1e-9;
  double loss_rel_tol = 1e-12;
  /// Bound |t|^2 <= eta on the translation. Unbounded when empty.
  std::optional<double> translation_bound_eta;
  Pose init_pose;
  std::size_t workers = default_workers();

  void validate() const;
};

struct RegistrationReport {
  Pose estimated_pose;  ///< angles wrapped to (-pi, pi]
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  ///< seconds
  std::optional<double> translation_error;  ///< meters, when ground truth was supplied
  std::optional<double> rotation_error;     ///< radians, when ground truth was supplied
  /// Set when the method gave up (for example a rank-deficient ICP cross-covariance).
  std::optional<std::string> failure;

  BfgsStop stop = BfgsStop::max_iters;
  int evaluations = 0;
  int bound_projections = 0;
  std::size_t num_centers = 0;
  double sigma = 0.0;
  std::vector<double> loss_history;
};

struct LossAndGradient {
  double loss = 0.0;
  Vector6 gradient = Vector6::Zero();
};

/// Sum over k of (m_k(T(source; pose)) - target_moments[k])^2.
/// Throws InvalidInput when target_moments were not produced by `basis`.
double loss(const PointCloud& source, const MomentVector& target_moments, const KernelBasis& basis, const Pose& pose,
            std::size_t workers = default_workers());

Vector6 loss_gradient(const PointCloud& source, const MomentVector& target_moments, const KernelBasis& basis,
                      const Pose& pose, std::size_t workers = default_workers());

LossAndGradient loss_and_gradient(const PointCloud& source, const MomentVector& target_moments,
                                  const KernelBasis& basis, const Pose& pose,
                                  std::size_t workers = default_workers());

/// A source cloud matched against fixed target moments. Owns the basis and the target
/// moments, which are computed once at construction.
class MomentMatchingProblem {
public:
  MomentMatchingProblem(PointCloud source, const PointCloud& target, KernelBasis basis,
                        std::size_t workers = default_workers());

  const KernelBasis& basis() const noexcept { return basis_; }
  const MomentVector& target_moments() const noexcept { return target_moments_; }
  const PointCloud& source() const noexcept { return source_; }

  LossAndGradient evaluate(const Pose& pose) const;

private:
  PointCloud source_;
  KernelBasis basis_;
  MomentVector target_moments_;
  std::size_t workers_;
};

/// Kernel width from a config and a target cloud.
double resolve_sigma(const MmrConfig& cfg, const PointCloud& target);

/// Builds the kernel basis for a target cloud (adaptive centers + width).
KernelBasis build_basis(const PointCloud& target, const MmrConfig& cfg);

/// Estimates the pose mapping `source` onto `target` by moment matching: centers and target
/// moments are built once, then BFGS runs from cfg.init_pose. When `truth` is given the
/// report carries translation and rotation errors against it.
RegistrationReport register_clouds(const PointCloud& source, const PointCloud& target, const MmrConfig& cfg = {},
                                   const std::optional<Pose>& truth = std::nullopt);

}  // namespace mmr
