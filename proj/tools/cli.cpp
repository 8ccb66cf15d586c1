#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <mmr/mmr.hpp>

namespace mmr::cli {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = default_workers();
  double sigma_scale = 0.05;
  std::size_t centers_k = 500;
  std::size_t density_threshold = 2000;
  int max_iters = 200;
  double shape_scale = 1.0;
  std::string output;
};

struct ScenarioFlags {
  std::string input;
  std::string shape = "box_surface";
  std::size_t points = 1000;
  std::size_t shape_points = 20000;
  int repeats = 10;
  bool baseline = false;
  std::string noise_target = "source";
  double max_rotation_deg = 20.0;
  double max_translation_frac = 0.3;
  bool no_timing = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_finite(std::string_view field, std::string_view context) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw InvalidInput(std::string(context) + ": '" + std::string(field) + "' is not a finite number");
  }
  return value;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

MmrConfig make_config(const Globals& g) {
  MmrConfig cfg;
  cfg.sigma_scale = g.sigma_scale;
  cfg.center_cfg.kmeans_k = g.centers_k;
  cfg.center_cfg.density_threshold = g.density_threshold;
  cfg.center_cfg.seed = g.seed;
  cfg.max_iters = g.max_iters;
  cfg.workers = g.threads;
  return cfg;
}

void emit_csv(const CsvTable& table, const Globals& g, std::ostream& out) {
  if (g.output.empty()) {
    write_csv(out, table);
  } else {
    write_results_csv(table, g.output);
  }
}

/// Summary text goes to stdout when the CSV went to a file, otherwise to stderr.
std::ostream& summary_stream(const Globals& g, std::ostream& out, std::ostream& err) {
  return g.output.empty() ? err : out;
}

ExperimentSpec make_experiment(const ScenarioFlags& f, const Globals& g) {
  ExperimentSpec spec;
  if (!f.input.empty()) spec.ply_path = f.input;
  spec.shape_id = f.shape;
  spec.shape_points = f.shape_points;
  spec.shape_scale = g.shape_scale;
  spec.target_point_count = f.points;
  spec.max_rotation_deg = f.max_rotation_deg;
  spec.max_translation_frac = f.max_translation_frac;
  spec.noise_target = f.noise_target == "both" ? NoiseTarget::both : NoiseTarget::source;
  spec.mmr = make_config(g);
  spec.repeats = f.repeats;
  spec.seed = g.seed;
  spec.baseline = f.baseline;
  return spec;
}

CsvTable rows_table(const std::vector<ExperimentRow>& rows, bool no_timing) {
  CsvTable t;
  t.header = {"method", "param_name", "param_value", "repeat", "seed", "trans_err_m", "rot_err_deg", "loss", "iters",
              "time_s"};
  for (const auto& r : rows) {
    t.rows.push_back({r.method, r.param_name, r.param_value, static_cast<std::int64_t>(r.repeat), r.seed,
                      r.trans_err_m, r.rot_err_deg, r.loss, static_cast<std::int64_t>(r.iters),
                      no_timing ? 0.0 : r.time_s});
  }
  return t;
}

void print_summaries(std::ostream& os, std::string_view label, const std::vector<ExperimentRow>& rows) {
  for (const auto& s : summarize(rows)) {
    os << std::left << std::setw(24) << label << std::setw(6) << s.method << " runs=" << s.runs
       << " failures=" << s.failures << " median_trans_err_m=" << fmt(s.median_trans_err)
       << " median_rot_err_deg=" << fmt(s.median_rot_err_deg) << '\n';
  }
}

void add_scenario_flags(CLI::App* sub, ScenarioFlags& f) {
  auto* input = sub->add_option("--input", f.input, "PLY file to downsample from")->check(CLI::ExistingFile);
  sub->add_option("--shape", f.shape, "procedural shape when no --input")
      ->check(CLI::IsMember({"sphere_surface", "box_surface", "torus_surface", "two_blobs"}))
      ->excludes(input);
  sub->add_option("--points", f.points, "points kept per repeat (0 keeps all)")->check(CLI::NonNegativeNumber);
  sub->add_option("--shape-points", f.shape_points, "size of the procedural scan")->check(CLI::Range(4, 100000000));
  sub->add_option("--repeats", f.repeats, "repeats per grid value")->check(CLI::Range(1, 1000000));
  sub->add_flag("--baseline", f.baseline, "also run the point-to-point ICP baseline");
  sub->add_option("--noise-target", f.noise_target, "cloud(s) receiving noise")
      ->check(CLI::IsMember({"source", "both"}));
  sub->add_option("--max-rotation-deg", f.max_rotation_deg, "truth rotation bound")->check(CLI::Range(0.0, 180.0));
  sub->add_option("--max-translation-frac", f.max_translation_frac, "truth translation bound / bbox diagonal")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--no-timing", f.no_timing, "write time_s = 0 so reruns are byte-identical");
}

int cmd_register(const Globals& g, const std::string& source_path, const std::string& target_path,
                 const std::string& init_text, const std::string& truth_text, const std::string& write_transformed,
                 std::ostream& out) {
  MmrConfig cfg = make_config(g);
  if (!init_text.empty()) cfg.init_pose = parse_pose6(init_text);
  std::optional<Pose> truth;
  if (!truth_text.empty()) truth = parse_pose6(truth_text);
  cfg.validate();

  const PointCloud source = read_ply(source_path);
  const PointCloud target = read_ply(target_path);
  const RegistrationReport r = register_clouds(source, target, cfg, truth);

  const Pose& p = r.estimated_pose;
  out << "estimated pose: yaw=" << fmt(rad2deg(p.yaw), 10) << " pitch=" << fmt(rad2deg(p.pitch), 10)
      << " roll=" << fmt(rad2deg(p.roll), 10) << " deg, t=(" << fmt(p.tx, 10) << ", " << fmt(p.ty, 10) << ", "
      << fmt(p.tz, 10) << ") m\n";
  out << "final loss: " << fmt(r.final_loss, 10) << '\n';
  out << "iterations: " << r.iterations << " (evaluations " << r.evaluations << ", stop " << to_string(r.stop)
      << ")\n";
  out << "centers: " << r.num_centers << ", sigma: " << fmt(r.sigma) << " m\n";
  out << "wall time: " << fmt(r.wall_time, 4) << " s\n";
  if (r.translation_error) out << "translation error: " << fmt(*r.translation_error) << " m\n";
  if (r.rotation_error) out << "rotation error: " << fmt(rad2deg(*r.rotation_error)) << " deg\n";

  if (!write_transformed.empty()) write_ply(apply(p, source), write_transformed);
  if (!g.output.empty()) {
    CsvTable t;
    t.header = {"yaw_deg", "pitch_deg", "roll_deg", "tx", "ty", "tz", "loss", "iters", "time_s", "converged",
                "trans_err_m", "rot_err_deg"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({rad2deg(p.yaw), rad2deg(p.pitch), rad2deg(p.roll), p.tx, p.ty, p.tz, r.final_loss,
                      static_cast<std::int64_t>(r.iterations), r.wall_time, static_cast<std::int64_t>(r.converged),
                      r.translation_error.value_or(nan), r.rotation_error ? rad2deg(*r.rotation_error) : nan});
    write_results_csv(t, g.output);
  }
  if (!r.converged) {
    out << "not converged\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_sweep(const Globals& g, const ScenarioFlags& f, const std::string& noise_grid, const std::string& outlier_grid,
              std::ostream& out, std::ostream& err) {
  if (noise_grid.empty() && outlier_grid.empty()) throw UsageError("sweep: give --noise-grid and/or --outlier-grid");
  std::optional<std::vector<double>> noise_values;
  std::optional<std::vector<double>> outlier_values;
  if (!noise_grid.empty()) noise_values = parse_number_list(noise_grid);
  if (!outlier_grid.empty()) outlier_values = parse_number_list(outlier_grid);
  const ExperimentSpec spec = make_experiment(f, g);
  spec.validate();

  std::vector<ExperimentRow> rows;
  if (noise_values) {
    for (auto& r : run_sweep(spec, SweepParam::gaussian_sigma, *noise_values)) rows.push_back(std::move(r));
  }
  if (outlier_values) {
    for (auto& r : run_sweep(spec, SweepParam::outlier_ratio, *outlier_values)) rows.push_back(std::move(r));
  }
  emit_csv(rows_table(rows, f.no_timing), g, out);

  std::ostream& os = summary_stream(g, out, err);
  auto summarize_grid = [&](SweepParam param, const std::vector<double>& values) {
    for (double v : values) {
      std::vector<ExperimentRow> subset;
      for (const auto& r : rows) {
        if (r.param_name == to_string(param) && r.param_value == v) subset.push_back(r);
      }
      print_summaries(os, std::string(to_string(param)) + "=" + fmt(v), subset);
    }
  };
  if (noise_values) summarize_grid(SweepParam::gaussian_sigma, *noise_values);
  if (outlier_values) summarize_grid(SweepParam::outlier_ratio, *outlier_values);
  for (const auto& r : rows) {
    if (!r.ok) os << "row failed: " << r.method << " repeat " << r.repeat << ": " << r.message << '\n';
  }
  return kOk;
}

int cmd_bench(const Globals& g, const ScenarioFlags& f, double noise, double outliers, std::ostream& out,
              std::ostream& err) {
  const ExperimentSpec spec = make_experiment(f, g);
  spec.validate();

  struct Scenario {
    std::string label;
    SweepParam param;
    double value;
  };
  const std::vector<Scenario> scenarios = {{"noiseless", SweepParam::gaussian_sigma, 0.0},
                                           {"gaussian", SweepParam::gaussian_sigma, noise},
                                           {"outliers", SweepParam::outlier_ratio, outliers}};
  std::vector<ExperimentRow> rows;
  std::ostream& os = summary_stream(g, out, err);
  for (const auto& s : scenarios) {
    auto part = run_sweep(spec, s.param, {s.value});
    print_summaries(os, s.label, part);
    for (const char* method : {"mmr", "icp"}) {
      std::vector<double> times;
      for (const auto& r : part) {
        if (r.method == method && r.ok) times.push_back(r.time_s);
      }
      if (!times.empty()) {
        os << std::left << std::setw(24) << s.label << std::setw(6) << method
           << " median_time_s=" << (f.no_timing ? std::string("-") : fmt(median(times), 4)) << '\n';
      }
    }
    for (auto& r : part) rows.push_back(std::move(r));
  }
  emit_csv(rows_table(rows, f.no_timing), g, out);
  return kOk;
}

int cmd_consistency(const Globals& g, const std::string& shape, const std::string& sizes_text, int repeats,
                    std::ostream& out, std::ostream& err) {
  ConsistencySpec spec;
  spec.shape_id = shape;
  spec.shape_scale = g.shape_scale;
  spec.repeats = repeats;
  spec.seed = g.seed;
  spec.mmr = make_config(g);
  spec.sizes.clear();
  for (double v : parse_number_list(sizes_text)) {
    if (v < 1.0 || v != std::floor(v)) throw InvalidInput("--sizes: '" + fmt(v) + "' is not a positive integer");
    spec.sizes.push_back(static_cast<std::size_t>(v));
  }
  spec.validate();

  const ConsistencyResult result = consistency_study(spec);
  CsvTable t;
  t.header = {"n", "repeat", "seed", "trans_err_m", "rot_err_deg"};
  for (const auto& r : result.rows) {
    t.rows.push_back({static_cast<std::uint64_t>(r.n), static_cast<std::int64_t>(r.repeat), r.seed, r.trans_err_m,
                      r.rot_err_deg});
  }
  emit_csv(t, g, out);

  std::ostream& os = summary_stream(g, out, err);
  for (const auto& m : result.medians) {
    os << "n=" << m.n << " median_trans_err_m=" << fmt(m.trans_err_m) << " median_rot_err_deg=" << fmt(m.rot_err_deg)
       << '\n';
  }
  if (result.medians.size() >= 2) {
    os << "median ratio (largest n / smallest n): "
       << fmt(result.medians.back().trans_err_m / result.medians.front().trans_err_m) << '\n';
  }
  for (const auto& r : result.rows) {
    if (!r.ok) os << "row failed: n=" << r.n << " repeat " << r.repeat << ": " << r.message << '\n';
  }
  return kOk;
}

}  // namespace

Pose parse_pose6(std::string_view text) {
  std::vector<double> v;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    v.push_back(parse_finite(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start),
                             "pose"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (v.size() != 6) {
    throw InvalidInput("pose: expected 6 comma-separated values yaw,pitch,roll,tx,ty,tz, got " +
                       std::to_string(v.size()));
  }
  return Pose{deg2rad(v[0]), deg2rad(v[1]), deg2rad(v[2]), v[3], v[4], v[5]};
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> v;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    v.push_back(parse_finite(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start),
                             "list"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return v;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correspondence-free rigid registration by kernel moment matching"};
  app.name("mmr");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "base seed for every random stream");
  app.add_option("--threads", g.threads, "worker threads (default: MMR_THREADS or hardware concurrency)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{4096}));
  app.add_option("--sigma-scale", g.sigma_scale, "kernel width / target bbox diagonal")->check(CLI::PositiveNumber);
  app.add_option("--centers-k", g.centers_k, "k-means centers for dense targets")->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  app.add_option("--density-threshold", g.density_threshold, "targets up to this size use every point as a center")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  app.add_option("--max-iters", g.max_iters, "BFGS iteration cap")->check(CLI::Range(1, 1000000));
  app.add_option("--shape-scale", g.shape_scale, "scale factor for procedural shapes")->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "CSV output path (stdout when omitted)");

  auto* reg = app.add_subcommand("register", "register a source PLY onto a target PLY");
  std::string source_path, target_path, init_text, truth_text, write_transformed;
  reg->add_option("--source", source_path, "source PLY")->required();
  reg->add_option("--target", target_path, "target PLY")->required();
  reg->add_option("--init", init_text, "initial pose yaw,pitch,roll,tx,ty,tz (deg, m)");
  reg->add_option("--truth", truth_text, "ground-truth pose yaw,pitch,roll,tx,ty,tz (deg, m)");
  reg->add_option("--write-transformed", write_transformed, "write the registered source to this PLY");

  auto* sweep = app.add_subcommand("sweep", "noise / outlier sweep, one CSV row per grid value, repeat and method");
  ScenarioFlags sweep_flags;
  std::string noise_grid, outlier_grid;
  add_scenario_flags(sweep, sweep_flags);
  sweep->add_option("--noise-grid", noise_grid, "Gaussian noise sigmas, comma separated");
  sweep->add_option("--outlier-grid", outlier_grid, "outlier ratios, comma separated");

  auto* bench = app.add_subcommand("bench", "noiseless, Gaussian-noise and outlier scenarios with timings");
  ScenarioFlags bench_flags;
  double bench_noise = 0.005;
  double bench_outliers = 0.1;
  add_scenario_flags(bench, bench_flags);
  bench->add_option("--noise", bench_noise, "Gaussian noise sigma")->check(CLI::NonNegativeNumber);
  bench->add_option("--outliers", bench_outliers, "outlier ratio")->check(CLI::Range(0.0, 0.999999));

  auto* cons = app.add_subcommand("consistency", "error vs. sample size on i.i.d. resampled clouds");
  std::string cons_shape = "box_surface";
  std::string cons_sizes = "100,400,1600,6400";
  int cons_repeats = 20;
  cons->add_option("--shape", cons_shape, "procedural shape")
      ->check(CLI::IsMember({"sphere_surface", "box_surface", "torus_surface", "two_blobs"}));
  cons->add_option("--sizes", cons_sizes, "strictly ascending sample sizes, comma separated");
  cons->add_option("--repeats", cons_repeats, "repeats per size")->check(CLI::Range(1, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (reg->parsed()) return cmd_register(g, source_path, target_path, init_text, truth_text, write_transformed, out);
    if (sweep->parsed()) return cmd_sweep(g, sweep_flags, noise_grid, outlier_grid, out, err);
    if (bench->parsed()) return cmd_bench(g, bench_flags, bench_noise, bench_outliers, out, err);
    if (cons->parsed()) return cmd_consistency(g, cons_shape, cons_sizes, cons_repeats, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const CorruptFile& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const UnsupportedFormat& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const DegenerateGeometry& e) {
    err << "degenerate geometry: " << e.what() << '\n';
    return kDegenerate;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << " (iteration " << e.iteration() << ", last loss " << e.last_f()
        << ")\n";
    return kNumerical;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kUsage;
}

}  // namespace mmr::cli
