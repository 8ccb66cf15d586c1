#include <mmr/centers.hpp>

#include <algorithm>
#include <limits>
#include <string>

#include <mmr/kernel_moments.hpp>
#include <mmr/random.hpp>

namespace mmr {

namespace {

struct Nearest {
  std::size_t index;
  double dist2;
};

Nearest nearest_center(const Point3& p, const std::vector<Point3>& centers) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d2 = (p - centers[c]).squaredNorm();
    if (d2 < best.dist2) best = {c, d2};
  }
  return best;
}

std::vector<Point3> seed_plus_plus(std::span<const Point3> points, std::size_t k, CounterRng& rng) {
  const std::size_t n = points.size();
  std::vector<Point3> centers;
  centers.reserve(k);
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t next = static_cast<std::size_t>(rng.below(n));
  while (true) {
    centers.push_back(points[next]);
    chosen[next] = true;
    if (centers.size() == k) break;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points[i] - points[next]).squaredNorm());
      total += d2[i];
    }
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      next = n;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        running += d2[i];
        if (running > target) {
          next = i;
          break;
        }
      }
      if (next == n) next = last_positive;
    } else {
      // Every remaining point coincides with a chosen center.
      next = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
  }
  return centers;
}

KMeansResult lloyd_run(const PointCloud& cloud, std::size_t k, int max_iters, double tol, std::uint64_t seed,
                       std::size_t workers) {
  const std::size_t n = cloud.size();
  const auto points = cloud.points();
  CounterRng rng(seed, 0x6b6d65616e73ull);

  KMeansResult result;
  result.centers = seed_plus_plus(points, k, rng);
  result.assignment.assign(n, 0);
  std::vector<double> dist2(n, 0.0);

  auto assign = [&] {
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const Nearest nc = nearest_center(points[i], result.centers);
        result.assignment[i] = nc.index;
        dist2[i] = nc.dist2;
      }
    });
    double wcss = 0.0;
    for (double d : dist2) wcss += d;
    result.wcss_history.push_back(wcss);
  };

  assign();
  std::vector<Point3> sums(k);
  std::vector<std::size_t> counts(k);
  std::vector<bool> taken(n);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), Point3::Zero());
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[result.assignment[i]] += points[i];
      ++counts[result.assignment[i]];
    }

    std::fill(taken.begin(), taken.end(), false);
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      Point3 updated;
      if (counts[c] > 0) {
        updated = sums[c] / static_cast<double>(counts[c]);
      } else {
        std::size_t far = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (!taken[i] && (far == n || dist2[i] > dist2[far])) far = i;
        }
        taken[far] = true;
        updated = points[far];
      }
      max_shift = std::max(max_shift, (updated - result.centers[c]).norm());
      result.centers[c] = updated;
    }

    assign();
    result.iterations = iter + 1;
    if (max_shift < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace

void CenterConfig::validate() const {
  if (density_threshold < 4) throw InvalidInput("CenterConfig: density_threshold must be >= 4");
  if (kmeans_k < 4) throw InvalidInput("CenterConfig: kmeans_k must be >= 4");
  if (kmeans_max_iters < 1) throw InvalidInput("CenterConfig: kmeans_max_iters must be >= 1");
  if (!(kmeans_tol > 0.0)) throw InvalidInput("CenterConfig: kmeans_tol must be > 0");
  if (kmeans_restarts < 1) throw InvalidInput("CenterConfig: kmeans_restarts must be >= 1");
}

double within_cluster_ss(const PointCloud& cloud, const std::vector<Point3>& centers) {
  if (centers.empty()) throw InvalidInput("within_cluster_ss: no centers");
  double total = 0.0;
  for (const auto& p : cloud) total += nearest_center(p, centers).dist2;
  return total;
}

KMeansResult kmeans_cluster(const PointCloud& cloud, std::size_t k, int max_iters, double tol, std::uint64_t seed,
                            std::size_t workers, int restarts) {
  const std::size_t n = cloud.size();
  if (k == 0) throw InvalidInput("kmeans: k must be positive");
  if (k > n) {
    throw InvalidInput("kmeans: k = " + std::to_string(k) + " exceeds the number of points " + std::to_string(n));
  }
  if (max_iters < 1) throw InvalidInput("kmeans: max_iters must be >= 1");
  if (restarts < 1) throw InvalidInput("kmeans: restarts must be >= 1");

  KMeansResult best = lloyd_run(cloud, k, max_iters, tol, seed, workers);
  for (int r = 1; r < restarts; ++r) {
    KMeansResult run = lloyd_run(cloud, k, max_iters, tol, derive_seed(seed, static_cast<std::uint64_t>(r)), workers);
    if (run.wcss_history.back() < best.wcss_history.back()) best = std::move(run);
  }
  return best;
}

std::vector<Point3> kmeans(const PointCloud& cloud, std::size_t k, int max_iters, double tol, std::uint64_t seed,
                           std::size_t workers, int restarts) {
  return kmeans_cluster(cloud, k, max_iters, tol, seed, workers, restarts).centers;
}

std::vector<Point3> allocate_centers(const PointCloud& cloud, const CenterConfig& cfg, std::size_t workers) {
  cfg.validate();
  require_non_coplanar(cloud.points(), "allocate_centers");

  const bool cluster = cfg.mode == CenterMode::kmeans ||
                       (cfg.mode == CenterMode::adaptive && cloud.size() > cfg.density_threshold);
  if (!cluster) return {cloud.begin(), cloud.end()};

  const std::size_t k = std::min(cloud.size(), cfg.kmeans_k);
  std::vector<Point3> centers = kmeans(cloud, k, cfg.kmeans_max_iters, cfg.kmeans_tol, cfg.seed, workers, cfg.kmeans_restarts);
  require_non_coplanar(centers, "allocate_centers (k-means output)");
  return centers;
}

}  // namespace mmr
