#pragma once

#include <optional>
#include <span>

#include <mmr/core.hpp>
#include <mmr/parallel.hpp>
#include <mmr/registration.hpp>

namespace mmr {

/// Least-squares rigid fit dst ~ R * src + t for paired points (Kabsch/Umeyama, no scale).
/// Returns nullopt when the 3x3 cross-covariance has rank < 3.
std::optional<HomogeneousTransform> fit_rigid(std::span<const Point3> src, std::span<const Point3> dst);

/// Point-to-point ICP with brute-force nearest neighbours; kept as a comparison baseline.
/// Stops when the transform changes by less than `tol` (Frobenius norm of the 4x4 difference)
/// or after `max_iters` rounds. final_loss is the mean squared nearest-neighbour distance.
RegistrationReport icp_baseline(const PointCloud& source, const PointCloud& target, int max_iters = 100,
                                double tol = 1e-12, const Pose& init = Pose::identity(),
                                const std::optional<Pose>& truth = std::nullopt,
                                std::size_t workers = default_workers());

}  // namespace mmr
