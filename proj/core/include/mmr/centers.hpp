#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <mmr/core.hpp>
#include <mmr/parallel.hpp>

namespace mmr {

enum class CenterMode {
  adaptive,    ///< all points up to density_threshold, k-means above it
  all_points,  ///< always use every point
  kmeans,      ///< always cluster
};

struct CenterConfig {
  std::size_t density_threshold = 2000;
  /// Upper bound on the number of clusters; the effective k is min(|cloud|, kmeans_k).
  std::size_t kmeans_k = 500;
  int kmeans_max_iters = 100;
  double kmeans_tol = 1e-9;
  /// Independent k-means++ seedings; the clustering with the lowest objective wins.
  int kmeans_restarts = 10;
  std::uint64_t seed = 0;
  CenterMode mode = CenterMode::adaptive;

  /// Throws InvalidInput when kmeans_k < 4, density_threshold < 4 or the k-means limits are not positive.
  void validate() const;
};

struct KMeansResult {
  std::vector<Point3> centers;
  std::vector<std::size_t> assignment;
  /// Within-cluster sum of squares after seeding and after every Lloyd iteration.
  std::vector<double> wcss_history;
  int iterations = 0;
  bool converged = false;
};

/// k-means++ seeding followed by Lloyd iterations until the largest center shift is below
/// `tol` or `max_iters` is reached. Empty clusters are re-seeded at the point farthest from
/// its assigned center (lowest index on ties). With restarts > 1 the whole procedure runs
/// once per restart (restart 0 uses `seed`, restart r uses derive_seed(seed, r)) and the run
/// with the lowest final objective is returned, earliest on ties. Deterministic for a given seed.
KMeansResult kmeans_cluster(const PointCloud& cloud, std::size_t k, int max_iters, double tol, std::uint64_t seed,
                            std::size_t workers = default_workers(), int restarts = 10);

std::vector<Point3> kmeans(const PointCloud& cloud, std::size_t k, int max_iters, double tol, std::uint64_t seed,
                           std::size_t workers = default_workers(), int restarts = 10);

/// Sum of squared distances from each point to its nearest center.
double within_cluster_ss(const PointCloud& cloud, const std::vector<Point3>& centers);

/// Picks RBF centers from the target cloud. Throws DegenerateGeometry when the cloud has
/// fewer than 4 points or is coplanar, or when clustering collapses to a coplanar set.
std::vector<Point3> allocate_centers(const PointCloud& cloud, const CenterConfig& cfg,
                                     std::size_t workers = default_workers());

}  // namespace mmr
