#include <mmr/synth.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Geometry>

#include <mmr/icp.hpp>
#include <mmr/metrics.hpp>
#include <mmr/ply.hpp>

namespace mmr {

namespace {

// Stream ids within one repeat seed.
enum Stream : std::uint64_t {
  kDownsample = 1,
  kTruth = 2,
  kSourceNoise = 3,
  kTargetNoise = 4,
};

Point3 sample_box_surface(CounterRng& rng) {
  const auto face = rng.below(6);
  const double u = rng.uniform(-0.5, 0.5);
  const double v = rng.uniform(-0.5, 0.5);
  const double w = (face % 2 == 0) ? 0.5 : -0.5;
  switch (face / 2) {
    case 0: return {w, u, v};
    case 1: return {u, w, v};
    default: return {u, v, w};
  }
}

Point3 sample_torus_surface(CounterRng& rng) {
  constexpr double kMajor = 1.0;
  constexpr double kMinor = 0.3;
  // Area element is proportional to (R + r cos v); rejection on that weight.
  while (true) {
    const double u = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double w = rng.uniform(0.0, kMajor + kMinor);
    if (w <= kMajor + kMinor * std::cos(v)) {
      const double ring = kMajor + kMinor * std::cos(v);
      return {ring * std::cos(u), ring * std::sin(u), kMinor * std::sin(v)};
    }
  }
}

Point3 sample_two_blobs(CounterRng& rng) {
  const Point3& mean = kBlobMeans[rng.below(2)];
  const double x = rng.normal();
  const double y = rng.normal();
  const double z = rng.normal();
  return mean + kBlobStddev * Point3(x, y, z);
}

ExperimentRow failed_row(std::string method, int repeat, std::uint64_t seed, const std::string& what) {
  ExperimentRow row;
  row.method = std::move(method);
  row.repeat = repeat;
  row.seed = seed;
  row.trans_err_m = std::numeric_limits<double>::quiet_NaN();
  row.rot_err_deg = std::numeric_limits<double>::quiet_NaN();
  row.loss = std::numeric_limits<double>::quiet_NaN();
  row.ok = false;
  row.message = what;
  return row;
}

ExperimentRow row_from_report(std::string method, int repeat, std::uint64_t seed, const RegistrationReport& r) {
  ExperimentRow row;
  row.method = std::move(method);
  row.repeat = repeat;
  row.seed = seed;
  row.trans_err_m = r.translation_error.value_or(std::numeric_limits<double>::quiet_NaN());
  row.rot_err_deg = rad2deg(r.rotation_error.value_or(std::numeric_limits<double>::quiet_NaN()));
  row.loss = r.final_loss;
  row.iters = r.iterations;
  row.time_s = r.wall_time;
  row.converged = r.converged;
  if (r.failure) row.message = *r.failure;
  return row;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

PointCloud load_input(const ExperimentSpec& spec) {
  PointCloud base = spec.ply_path ? read_ply(*spec.ply_path) : make_shape(spec.shape_id, spec.shape_points, spec.seed);
  if (spec.shape_scale != 1.0) base = scale_cloud(base, spec.shape_scale);
  return base;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

PointCloud make_shape(std::string_view shape_id, std::size_t n, std::uint64_t seed) {
  if (n < 4) throw InvalidInput("make_shape: need n >= 4");
  Point3 (*sampler)(CounterRng&) = nullptr;
  if (shape_id == "sphere_surface") {
    sampler = [](CounterRng& rng) { return rng.unit_vector(); };
  } else if (shape_id == "box_surface") {
    sampler = sample_box_surface;
  } else if (shape_id == "torus_surface") {
    sampler = sample_torus_surface;
  } else if (shape_id == "two_blobs") {
    sampler = sample_two_blobs;
  } else {
    throw InvalidInput("make_shape: unknown shape id '" + std::string(shape_id) + "'");
  }

  CounterRng rng(seed, 0x7368617065ull);
  std::vector<Point3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(sampler(rng));
  return PointCloud(std::move(points), std::string(shape_id));
}

PointCloud scale_cloud(const PointCloud& cloud, double factor) {
  if (!std::isfinite(factor) || factor <= 0.0) throw InvalidInput("scale_cloud: factor must be positive");
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.emplace_back(p * factor);
  return PointCloud(std::move(out), cloud.frame_label());
}

PointCloud uniform_downsample(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  if (n > cloud.size()) {
    throw InvalidInput("uniform_downsample: requested " + std::to_string(n) + " of " + std::to_string(cloud.size()) +
                       " points");
  }
  std::vector<std::size_t> index(cloud.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  CounterRng rng(seed, 0x646f776eull);
  // Partial Fisher-Yates: the first n slots are a uniform sample without replacement.
  std::vector<Point3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(cloud.size() - i));
    std::swap(index[i], index[j]);
    out.push_back(cloud[index[i]]);
  }
  return PointCloud(std::move(out), cloud.frame_label());
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return cloud;
  CounterRng rng(seed, 0x6e6f697365ull);
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    const double dx = rng.normal();
    const double dy = rng.normal();
    const double dz = rng.normal();
    out.emplace_back(p + sigma * Point3(dx, dy, dz));
  }
  return PointCloud(std::move(out), cloud.frame_label());
}

PointCloud add_uniform_outliers(const PointCloud& cloud, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw InvalidInput("add_uniform_outliers: ratio must be in [0, 1)");
  const auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(cloud.size())));
  if (count == 0) return cloud;
  const Point3 lo = cloud.min_corner();
  const Point3 hi = cloud.max_corner();
  CounterRng rng(seed, 0x6f75746cull);
  std::vector<Point3> out(cloud.begin(), cloud.end());
  out.reserve(cloud.size() + count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform(lo.x(), hi.x());
    const double y = rng.uniform(lo.y(), hi.y());
    const double z = rng.uniform(lo.z(), hi.z());
    out.emplace_back(x, y, z);
  }
  return PointCloud(std::move(out), cloud.frame_label());
}

void NoiseSpec::validate() const {
  if (!(gaussian_sigma >= 0.0) || !std::isfinite(gaussian_sigma)) throw InvalidInput("NoiseSpec: gaussian_sigma must be >= 0");
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) throw InvalidInput("NoiseSpec: outlier_ratio must be in [0, 1)");
}

PointCloud apply_noise(const PointCloud& cloud, const NoiseSpec& noise) {
  noise.validate();
  PointCloud out = add_gaussian_noise(cloud, noise.gaussian_sigma, derive_seed(noise.seed, 0));
  return add_uniform_outliers(out, noise.outlier_ratio, derive_seed(noise.seed, 1));
}

Pose sample_truth_pose(double max_angle, double max_translation, CounterRng& rng) {
  const double angle = rng.uniform(0.0, max_angle);
  const Point3 axis = rng.unit_vector();
  const Point3 direction = rng.unit_vector();
  const double length = rng.uniform(0.0, max_translation);
  const Matrix3 r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  return HomogeneousTransform(r, length * direction).to_pose();
}

void ExperimentSpec::validate() const {
  if (target_point_count != 0 && target_point_count < 4) throw InvalidInput("ExperimentSpec: target_point_count must be >= 4");
  if (repeats < 1) throw InvalidInput("ExperimentSpec: repeats must be >= 1");
  if (!(shape_scale > 0.0)) throw InvalidInput("ExperimentSpec: shape_scale must be > 0");
  if (!(max_rotation_deg >= 0.0) || !(max_translation_frac >= 0.0)) {
    throw InvalidInput("ExperimentSpec: transform ranges must be >= 0");
  }
  if (icp_max_iters < 1) throw InvalidInput("ExperimentSpec: icp_max_iters must be >= 1");
  noise.validate();
  mmr.validate();
}

const MethodSummary& ExperimentResult::summary(std::string_view method) const {
  for (const auto& s : summaries) {
    if (s.method == method) return s;
  }
  throw InvalidInput("ExperimentResult: no summary for method '" + std::string(method) + "'");
}

std::vector<MethodSummary> summarize(const std::vector<ExperimentRow>& rows) {
  std::vector<MethodSummary> out;
  for (const char* method : {"mmr", "icp"}) {
    std::vector<double> trans;
    std::vector<double> rot;
    MethodSummary s;
    s.method = method;
    for (const auto& row : rows) {
      if (row.method != method) continue;
      ++s.runs;
      if (!row.ok) {
        ++s.failures;
        continue;
      }
      trans.push_back(row.trans_err_m);
      rot.push_back(row.rot_err_deg);
    }
    if (s.runs == 0) continue;
    s.median_trans_err = median(trans);
    s.mean_trans_err = mean_of(trans);
    s.std_trans_err = stddev_of(trans);
    s.median_rot_err_deg = median(rot);
    s.mean_rot_err_deg = mean_of(rot);
    s.std_rot_err_deg = stddev_of(rot);
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const PointCloud base = load_input(spec);
  const std::size_t keep = spec.target_point_count == 0 ? base.size() : spec.target_point_count;
  if (keep > base.size()) {
    throw InvalidInput("run_experiment: input has " + std::to_string(base.size()) + " points, fewer than " +
                       std::to_string(keep));
  }
  const double diag = base.bbox_diagonal();

  const std::size_t methods = spec.baseline ? 2 : 1;
  std::vector<ExperimentRow> rows(static_cast<std::size_t>(spec.repeats) * methods);

  parallel_for(static_cast<std::size_t>(spec.repeats), spec.repeat_workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const int repeat = static_cast<int>(r);
      const std::uint64_t seed = derive_seed(spec.seed, r);
      ExperimentRow* slot = &rows[r * methods];
      try {
        const PointCloud target_clean = uniform_downsample(base, keep, derive_seed(seed, kDownsample));
        CounterRng truth_rng(seed, kTruth);
        const Pose truth = spec.truth_pose ? *spec.truth_pose
                                           : sample_truth_pose(deg2rad(spec.max_rotation_deg),
                                                               spec.max_translation_frac * diag, truth_rng);

        NoiseSpec source_noise = spec.noise;
        source_noise.seed = derive_seed(seed, kSourceNoise);
        const PointCloud source = apply_noise(apply(inverse(HomogeneousTransform(truth)), target_clean), source_noise);

        PointCloud target = target_clean;
        if (spec.noise_target == NoiseTarget::both) {
          NoiseSpec target_noise = spec.noise;
          target_noise.seed = derive_seed(seed, kTargetNoise);
          target = apply_noise(target_clean, target_noise);
        }

        try {
          slot[0] = row_from_report("mmr", repeat, seed, register_clouds(source, target, spec.mmr, truth));
        } catch (const Error& e) {
          slot[0] = failed_row("mmr", repeat, seed, e.what());
        }
        if (spec.baseline) {
          try {
            slot[1] = row_from_report("icp", repeat, seed,
                                      icp_baseline(source, target, spec.icp_max_iters, spec.icp_tol, Pose::identity(),
                                                   truth, spec.mmr.workers));
          } catch (const Error& e) {
            slot[1] = failed_row("icp", repeat, seed, e.what());
          }
        }
      } catch (const Error& e) {
        slot[0] = failed_row("mmr", repeat, seed, e.what());
        if (spec.baseline) slot[1] = failed_row("icp", repeat, seed, e.what());
      }
    }
  });

  ExperimentResult result;
  result.rows = std::move(rows);
  result.summaries = summarize(result.rows);
  return result;
}

std::string_view to_string(SweepParam p) {
  return p == SweepParam::gaussian_sigma ? "gaussian_sigma" : "outlier_ratio";
}

std::vector<ExperimentRow> run_sweep(const ExperimentSpec& spec, SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw InvalidInput("run_sweep: empty grid");
  std::vector<ExperimentRow> out;
  for (double value : values) {
    ExperimentSpec point = spec;
    if (param == SweepParam::gaussian_sigma) {
      point.noise.gaussian_sigma = value;
    } else {
      point.noise.outlier_ratio = value;
    }
    for (auto& row : run_experiment(point).rows) {
      row.param_name = std::string(to_string(param));
      row.param_value = value;
      out.push_back(std::move(row));
    }
  }
  return out;
}

void ConsistencySpec::validate() const {
  if (sizes.empty()) throw InvalidInput("ConsistencySpec: sizes must not be empty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 4) throw InvalidInput("ConsistencySpec: every size must be >= 4");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw InvalidInput("ConsistencySpec: sizes must be strictly ascending");
  }
  if (repeats < 1) throw InvalidInput("ConsistencySpec: repeats must be >= 1");
  if (!(shape_scale > 0.0)) throw InvalidInput("ConsistencySpec: shape_scale must be > 0");
  if (!truth.is_finite()) throw InvalidInput("ConsistencySpec: truth is not finite");
  mmr.validate();
}

ConsistencyResult consistency_study(const ConsistencySpec& spec) {
  spec.validate();
  const HomogeneousTransform truth_inverse = inverse(HomogeneousTransform(spec.truth));

  ConsistencyResult result;
  for (std::size_t n : spec.sizes) {
    std::vector<double> trans;
    std::vector<double> rot;
    for (int r = 0; r < spec.repeats; ++r) {
      ConsistencyRow row;
      row.n = n;
      row.repeat = r;
      row.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));
      try {
        PointCloud target = make_shape(spec.shape_id, n, derive_seed(row.seed, 2 * n));
        PointCloud source = make_shape(spec.shape_id, n, derive_seed(row.seed, 2 * n + 1));
        if (spec.shape_scale != 1.0) {
          target = scale_cloud(target, spec.shape_scale);
          source = scale_cloud(source, spec.shape_scale);
        }
        const RegistrationReport report =
            register_clouds(apply(truth_inverse, source), target, spec.mmr, spec.truth);
        row.trans_err_m = *report.translation_error;
        row.rot_err_deg = rad2deg(*report.rotation_error);
        trans.push_back(row.trans_err_m);
        rot.push_back(row.rot_err_deg);
      } catch (const Error& e) {
        row.ok = false;
        row.trans_err_m = std::numeric_limits<double>::quiet_NaN();
        row.rot_err_deg = std::numeric_limits<double>::quiet_NaN();
        row.message = e.what();
      }
      result.rows.push_back(std::move(row));
    }
    result.medians.push_back({n, median(trans), median(rot)});
  }
  return result;
}

}  // namespace mmr
