#include <map>

#include <benchmark/benchmark.h>

#include <mmr/mmr.hpp>

namespace {

using namespace mmr;

const PointCloud& box_cloud(std::size_t n) {
  static std::map<std::size_t, PointCloud> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, scale_cloud(make_shape("box_surface", n, 7), 0.15)).first;
  return it->second;
}

const Pose kPose{deg2rad(12.0), deg2rad(-7.0), deg2rad(5.0), 0.03, -0.02, 0.01};

void BM_EmpiricalMoments(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud& cloud = box_cloud(n);
  const KernelBasis basis(std::vector<Point3>(cloud.begin(), cloud.end()), 0.05 * cloud.bbox_diagonal());
  for (auto _ : state) benchmark::DoNotOptimize(empirical_moments(basis, cloud, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_EmpiricalMoments)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LossAndGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto workers = static_cast<std::size_t>(state.range(1));
  const PointCloud& target = box_cloud(n);
  MomentMatchingProblem problem(apply(inverse(kPose), target), target,
                                KernelBasis(std::vector<Point3>(target.begin(), target.end()),
                                            0.05 * target.bbox_diagonal()),
                                workers);
  for (auto _ : state) benchmark::DoNotOptimize(problem.evaluate(Pose::identity()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_LossAndGradient)->Args({250, 1})->Args({1000, 1})->Args({1000, 4})->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const PointCloud& cloud = box_cloud(static_cast<std::size_t>(state.range(0)));
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(cloud, k, 100, 1e-9, 3, 1));
}
BENCHMARK(BM_KMeans)->Args({5000, 100})->Args({20000, 500})->Unit(benchmark::kMillisecond);

void BM_Register(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud& target = box_cloud(n);
  const PointCloud source = apply(inverse(kPose), target);
  MmrConfig cfg;
  cfg.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(register_clouds(source, target, cfg));
}
BENCHMARK(BM_Register)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_IcpBaseline(benchmark::State& state) {
  const PointCloud& target = box_cloud(1000);
  const PointCloud source = apply(inverse(kPose), target);
  for (auto _ : state) benchmark::DoNotOptimize(icp_baseline(source, target, 100, 1e-12, Pose::identity(), std::nullopt, 1));
}
BENCHMARK(BM_IcpBaseline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
