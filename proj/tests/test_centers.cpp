#include <doctest.h>

#include <algorithm>
#include <array>
#include <limits>

#include "support.hpp"

using namespace mmr;
using mmr::test::random_cloud;

namespace {

bool lex_less(const Point3& a, const Point3& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

std::vector<Point3> sorted(std::vector<Point3> v) {
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

// Exhaustive minimum of the k-means objective over all labelings of a small set.
double brute_force_wcss(const std::vector<Point3>& pts, int k) {
  const std::size_t n = pts.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(k);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> label(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = static_cast<int>(c % k);
      c /= k;
    }
    std::array<Point3, 8> sum;
    std::array<int, 8> count{};
    for (int j = 0; j < k; ++j) sum[j].setZero();
    for (std::size_t i = 0; i < n; ++i) {
      sum[label[i]] += pts[i];
      ++count[label[i]];
    }
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += (pts[i] - sum[label[i]] / count[label[i]]).squaredNorm();
    best = std::min(best, w);
  }
  return best;
}

// Plain Lloyd from random distinct starting points; best of many restarts.
std::vector<Point3> restarted_lloyd(const PointCloud& cloud, std::size_t k, int restarts, std::uint64_t seed) {
  CounterRng rng(seed, 99);
  std::vector<Point3> best;
  double best_w = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<Point3> c;
    for (std::size_t j = 0; j < k; ++j) c.push_back(cloud[rng.below(cloud.size())]);
    for (int it = 0; it < 200; ++it) {
      std::vector<Point3> sum(k, Point3::Zero());
      std::vector<int> cnt(k, 0);
      for (const auto& p : cloud) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < k; ++j) {
          if ((p - c[j]).squaredNorm() < (p - c[arg]).squaredNorm()) arg = j;
        }
        sum[arg] += p;
        ++cnt[arg];
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (cnt[j] > 0) c[j] = sum[j] / cnt[j];
      }
    }
    const double w = within_cluster_ss(cloud, c);
    if (w < best_w) {
      best_w = w;
      best = c;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("sparse branch returns the points verbatim and in order") {
  CounterRng rng(1);
  const PointCloud cloud = random_cloud(rng, 100);
  const auto centers = allocate_centers(cloud, CenterConfig{});
  REQUIRE(centers.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(centers[i] == cloud[i]);
}

TEST_CASE("forced clustering of a tetrahedron keeps the four vertices") {
  const PointCloud tetra({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CenterConfig cfg;
  cfg.mode = CenterMode::kmeans;
  cfg.kmeans_k = 4;
  CHECK(sorted(allocate_centers(tetra, cfg)) == sorted({tetra.begin(), tetra.end()}));
}

TEST_CASE("dense branch clusters down to kmeans_k") {
  CounterRng rng(2);
  const PointCloud cloud = random_cloud(rng, 3000);
  CenterConfig cfg;
  cfg.kmeans_k = 40;
  const auto centers = allocate_centers(cloud, cfg, 1);
  CHECK(centers.size() == 40);
  CHECK(is_non_coplanar(centers));
  cfg.density_threshold = 5000;
  CHECK(allocate_centers(cloud, cfg, 1).size() == 3000);
}

TEST_CASE("degenerate targets are rejected") {
  CHECK_THROWS_AS(allocate_centers(PointCloud({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), CenterConfig{}), DegenerateGeometry);
  CounterRng rng(3);
  std::vector<Point3> flat;
  for (int i = 0; i < 200; ++i) flat.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.25);
  CHECK_THROWS_AS(allocate_centers(PointCloud(flat), CenterConfig{}), DegenerateGeometry);

  CenterConfig bad;
  bad.kmeans_k = 3;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = CenterConfig{};
  bad.density_threshold = 2;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("kmeans edge cases") {
  CounterRng rng(4);
  const PointCloud cloud = random_cloud(rng, 25);
  CHECK(sorted(kmeans(cloud, 25, 100, 1e-12, 7, 1)) == sorted({cloud.begin(), cloud.end()}));

  const PointCloud same(std::vector<Point3>(10, Point3(0.5, -1, 2)));
  const auto one = kmeans(same, 1, 100, 1e-12, 7, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Point3(0.5, -1, 2));

  CHECK_THROWS_AS(kmeans(cloud, 26, 100, 1e-12, 7, 1), InvalidInput);
  CHECK_THROWS_AS(kmeans(cloud, 0, 100, 1e-12, 7, 1), InvalidInput);
}

TEST_CASE("kmeans handles more clusters than distinct locations") {
  std::vector<Point3> pts;
  for (int i = 0; i < 5; ++i) {
    pts.emplace_back(0, 0, 0);
    pts.emplace_back(1, 0, 0);
    pts.emplace_back(0, 1, 0);
  }
  const auto result = kmeans_cluster(PointCloud(pts), 5, 50, 1e-12, 3, 1, 1);
  CHECK(result.centers.size() == 5);
  CHECK(result.wcss_history.back() == 0.0);
}

TEST_CASE("kmeans is near-optimal on small instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed, 5);
    std::vector<Point3> pts;
    const std::array<Point3, 3> blobs = {Point3(0, 0, 0), Point3(1, 0.2, 0), Point3(0.3, 1, 0.5)};
    for (int i = 0; i < 12; ++i) {
      pts.push_back(blobs[i % 3] + 0.25 * Point3(rng.normal(), rng.normal(), rng.normal()));
    }
    const PointCloud cloud(pts);
    const double optimum = brute_force_wcss(pts, 3);
    const double got = within_cluster_ss(cloud, kmeans(cloud, 3, 100, 1e-12, seed, 1));
    CHECK(got <= 1.05 * optimum);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed, 6);
    const PointCloud cloud = random_cloud(rng, 12);
    const std::vector<Point3> pts(cloud.begin(), cloud.end());
    CHECK(within_cluster_ss(cloud, kmeans(cloud, 3, 100, 1e-12, seed, 1, 20)) <= 1.05 * brute_force_wcss(pts, 3));
  }
}

TEST_CASE("restarts keep the best clustering") {
  const PointCloud cloud = make_shape("torus_surface", 3000, 8);
  const auto single = kmeans_cluster(cloud, 30, 100, 1e-9, 4, 1, 1);
  const auto many = kmeans_cluster(cloud, 30, 100, 1e-9, 4, 1, 8);
  CHECK(many.wcss_history.back() <= single.wcss_history.back());
  for (int r = 1; r < 8; ++r) {
    const auto run = kmeans_cluster(cloud, 30, 100, 1e-9, derive_seed(4, static_cast<std::uint64_t>(r)), 1, 1);
    CHECK(many.wcss_history.back() <= run.wcss_history.back());
  }
  CHECK_THROWS_AS(kmeans(cloud, 30, 100, 1e-9, 4, 1, 0), InvalidInput);
}

TEST_CASE("two-blob mixture centers land on the blob means") {
  const PointCloud cloud = make_shape("two_blobs", 10000, 21);
  auto centers = kmeans(cloud, 2, 100, 1e-12, 5, 1);
  REQUIRE(centers.size() == 2);
  std::sort(centers.begin(), centers.end(), lex_less);
  CHECK((centers[0] - kBlobMeans[0]).norm() < 0.05);
  CHECK((centers[1] - kBlobMeans[1]).norm() < 0.05);

  auto oracle = restarted_lloyd(cloud, 2, 20, 1);
  std::sort(oracle.begin(), oracle.end(), lex_less);
  CHECK((centers[0] - oracle[0]).norm() < 1e-9);
  CHECK((centers[1] - oracle[1]).norm() < 1e-9);
}

TEST_CASE("Lloyd iterations never increase the objective") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const PointCloud cloud = make_shape("torus_surface", 4000, seed);
    const auto result = kmeans_cluster(cloud, 50, 100, 1e-12, seed, 1, 1);
    REQUIRE(result.wcss_history.size() >= 2);
    for (std::size_t i = 1; i < result.wcss_history.size(); ++i) {
      CHECK(result.wcss_history[i] <= result.wcss_history[i - 1] * (1 + 1e-12));
    }
  }
}

TEST_CASE("kmeans is deterministic and independent of the worker count") {
  const PointCloud cloud = make_shape("box_surface", 5000, 3);
  const auto a = kmeans(cloud, 60, 100, 1e-9, 11, 1);
  CHECK(kmeans(cloud, 60, 100, 1e-9, 11, 1) == a);
  CHECK(kmeans(cloud, 60, 100, 1e-9, 11, 4) == a);
  CHECK(kmeans(cloud, 60, 100, 1e-9, 12, 1) != a);
}
