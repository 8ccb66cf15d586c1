#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include <mmr/mmr.hpp>

namespace mmr::test {

inline Pose random_pose(CounterRng& rng, double max_angle = 3.0, double max_t = 2.0) {
  return Pose{rng.uniform(-max_angle, max_angle), rng.uniform(-1.4, 1.4), rng.uniform(-max_angle, max_angle),
              rng.uniform(-max_t, max_t),         rng.uniform(-max_t, max_t), rng.uniform(-max_t, max_t)};
}

inline PointCloud random_cloud(CounterRng& rng, std::size_t n, double half_width = 1.0) {
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts.emplace_back(rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width),
                     rng.uniform(-half_width, half_width));
  }
  return PointCloud(std::move(pts));
}

inline double max_abs_diff(const PointCloud& a, const PointCloud& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return m;
}

/// Fresh, empty directory under the system temp dir; removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("mmr_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace mmr::test
