#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <mmr/core.hpp>
#include <mmr/random.hpp>
#include <mmr/registration.hpp>

namespace mmr {

// ---------------------------------------------------------------------------
// Procedural shapes and corruption models
// ---------------------------------------------------------------------------

/// Shape ids accepted by make_shape.
inline constexpr std::array<std::string_view, 4> kShapeIds = {"sphere_surface", "box_surface", "torus_surface",
                                                              "two_blobs"};

/// Mixture components of "two_blobs": isotropic Gaussians with this standard deviation.
inline constexpr double kBlobStddev = 0.15;
inline const std::array<Point3, 2> kBlobMeans = {Point3(-0.6, 0.0, 0.0), Point3(0.6, 0.0, 0.0)};

/// n i.i.d. points from a named shape:
///   sphere_surface  unit sphere
///   box_surface     surface of the cube [-0.5, 0.5]^3, faces equally likely
///   torus_surface   torus about z, major radius 1, minor radius 0.3, area-uniform
///   two_blobs       equal mixture of two Gaussians (kBlobMeans, kBlobStddev)
/// Throws InvalidInput for an unknown id or n < 4.
PointCloud make_shape(std::string_view shape_id, std::size_t n, std::uint64_t seed);

PointCloud scale_cloud(const PointCloud& cloud, double factor);

/// n points drawn without replacement, in draw order. Throws InvalidInput if n > |cloud|.
PointCloud uniform_downsample(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

/// Adds N(0, sigma^2) independently to every coordinate.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// Appends floor(ratio * |cloud|) points uniform in the cloud's axis-aligned bounding box.
PointCloud add_uniform_outliers(const PointCloud& cloud, double ratio, std::uint64_t seed);

struct NoiseSpec {
  double gaussian_sigma = 0.0;  ///< meters
  double outlier_ratio = 0.0;   ///< in [0, 1)
  std::uint64_t seed = 0;

  void validate() const;
};

/// Gaussian noise followed by outliers (outliers are not jittered).
PointCloud apply_noise(const PointCloud& cloud, const NoiseSpec& noise);

/// Rotation by an angle uniform in [0, max_angle] about a uniform axis, translation of
/// length uniform in [0, max_translation] in a uniform direction.
Pose sample_truth_pose(double max_angle, double max_translation, CounterRng& rng);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class NoiseTarget { source, both };

struct ExperimentSpec {
  /// PLY file to load; when empty the procedural shape below is used.
  std::optional<std::string> ply_path;
  std::string shape_id = "box_surface";
  /// Size of the fixed procedural "scan" that each repeat downsamples from.
  std::size_t shape_points = 20000;
  double shape_scale = 1.0;
  /// Points kept per repeat by uniform downsampling; 0 keeps the full input.
  std::size_t target_point_count = 1000;

  /// Fixed ground truth; sampled per repeat when empty.
  std::optional<Pose> truth_pose;
  double max_rotation_deg = 20.0;
  /// Translation bound as a fraction of the input's bounding-box diagonal.
  double max_translation_frac = 0.3;

  NoiseSpec noise;
  NoiseTarget noise_target = NoiseTarget::source;
  MmrConfig mmr;
  int repeats = 1;
  std::uint64_t seed = 0;

  bool baseline = false;
  int icp_max_iters = 100;
  double icp_tol = 1e-12;

  /// Repeats run concurrently on up to this many threads; rows stay in repeat order.
  std::size_t repeat_workers = 1;

  void validate() const;
};

struct ExperimentRow {
  std::string method;  ///< "mmr" or "icp"
  std::string param_name;
  double param_value = 0.0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double trans_err_m = 0.0;
  double rot_err_deg = 0.0;
  double loss = 0.0;
  int iters = 0;
  double time_s = 0.0;
  bool ok = true;
  bool converged = false;
  std::string message;
};

struct MethodSummary {
  std::string method;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double median_trans_err = 0.0;
  double mean_trans_err = 0.0;
  double std_trans_err = 0.0;
  double median_rot_err_deg = 0.0;
  double mean_rot_err_deg = 0.0;
  double std_rot_err_deg = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<MethodSummary> summaries;  ///< "mmr" first, then "icp" when enabled

  const MethodSummary& summary(std::string_view method) const;
};

/// Each repeat downsamples the input, draws a truth pose and registers the noisy
/// inverse(truth) image of the target back onto it.
/// A repeat that throws is recorded with ok = false; the run continues.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Noise parameter varied by a sweep.
enum class SweepParam { gaussian_sigma, outlier_ratio };
std::string_view to_string(SweepParam p);

/// Runs the experiment once per grid value with the same repeat seeds, so every grid
/// point sees the same targets and truths.
std::vector<ExperimentRow> run_sweep(const ExperimentSpec& spec, SweepParam param, const std::vector<double>& values);

std::vector<MethodSummary> summarize(const std::vector<ExperimentRow>& rows);

// ---------------------------------------------------------------------------
// Consistency study
// ---------------------------------------------------------------------------

struct ConsistencySpec {
  std::string shape_id = "box_surface";
  double shape_scale = 1.0;
  std::vector<std::size_t> sizes = {100, 400, 1600, 6400};
  int repeats = 20;
  std::uint64_t seed = 0;
  /// Fixed truth shared by all repeats and sizes.
  Pose truth{deg2rad(10.0), deg2rad(-6.0), deg2rad(8.0), 0.15, -0.10, 0.10};
  MmrConfig mmr;

  void validate() const;
};

struct ConsistencyRow {
  std::size_t n = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double trans_err_m = 0.0;
  double rot_err_deg = 0.0;
  bool ok = true;
  std::string message;
};

struct ConsistencyResult {
  std::vector<ConsistencyRow> rows;
  /// (n, median translation error, median rotation error in degrees), ascending n.
  struct Median {
    std::size_t n;
    double trans_err_m;
    double rot_err_deg;
  };
  std::vector<Median> medians;
};

/// For each size N and repeat: fresh independent target and source samples of N points
/// (the source mapped by the inverse truth), registered with spec.mmr.
ConsistencyResult consistency_study(const ConsistencySpec& spec);

double median(std::vector<double> values);

}  // namespace mmr
