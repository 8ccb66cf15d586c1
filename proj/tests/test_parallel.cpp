#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "support.hpp"

using namespace mmr;

TEST_CASE("parallel_for visits every index exactly once") {
  for (std::size_t n : {0u, 1u, 7u, 16u, 100u, 1001u}) {
    for (std::size_t workers : {1u, 2u, 3u, 8u, 64u}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) hits[i].fetch_add(1);
      });
      for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
    }
  }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t b, std::size_t e) {
                                 for (std::size_t i = b; i < e; ++i) {
                                   if (i == 77) throw std::runtime_error("boom");
                                 }
                               }),
                  std::runtime_error);
}

TEST_CASE("pairwise_sum is exact on integers and independent of the caller") {
  for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 1000u, 4097u}) {
    const double s = pairwise_sum<double>(0, n, [](std::size_t i) { return static_cast<double>(i); });
    CHECK(s == static_cast<double>(n) * (n == 0 ? 0 : n - 1) / 2);
  }
  CounterRng rng(1);
  std::vector<double> v(10000);
  for (auto& x : v) x = rng.uniform(-1, 1) * 1e3;
  const auto term = [&](std::size_t i) { return v[i]; };
  CHECK(pairwise_sum<double>(0, v.size(), term) == pairwise_sum<double>(0, v.size(), term));
  long double exact = 0;
  for (double x : v) exact += x;
  CHECK(std::abs(static_cast<double>(exact) - pairwise_sum<double>(0, v.size(), term)) < 1e-9);
}

TEST_CASE("default_workers honours MMR_THREADS") {
  ::setenv("MMR_THREADS", "3", 1);
  CHECK(default_workers() == 3);
  ::setenv("MMR_THREADS", "not-a-number", 1);
  CHECK(default_workers() >= 1);
  ::unsetenv("MMR_THREADS");
  CHECK(default_workers() >= 1);
}
