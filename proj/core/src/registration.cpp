#include <mmr/registration.hpp>

#include <chrono>
#include <cmath>
#include <string>

#include <mmr/metrics.hpp>

namespace mmr {

namespace {

void check_basis(const MomentVector& target_moments, const KernelBasis& basis) {
  if (target_moments.basis_id != basis.id() || target_moments.size() != basis.size()) {
    throw InvalidInput("loss: target moments were computed with a different kernel basis");
  }
}

LossAndGradient combine(const TransformedMoments& tm, const MomentVector& target_moments) {
  const std::size_t kappa = target_moments.size();
  Eigen::VectorXd residual(static_cast<Eigen::Index>(kappa));
  for (std::size_t k = 0; k < kappa; ++k) {
    residual[static_cast<Eigen::Index>(k)] = tm.moments.values[k] - target_moments.values[k];
  }
  LossAndGradient out;
  out.loss = pairwise_sum<double>(0, kappa, [&](std::size_t k) {
    const double r = residual[static_cast<Eigen::Index>(k)];
    return r * r;
  });
  out.gradient = 2.0 * (tm.jacobian.transpose() * residual);
  return out;
}

}  // namespace

void MmrConfig::validate() const {
  if (!(sigma_scale > 0.0) || !std::isfinite(sigma_scale)) throw InvalidInput("MmrConfig: sigma_scale must be > 0");
  if (sigma && (!(*sigma > 0.0) || !std::isfinite(*sigma))) throw InvalidInput("MmrConfig: sigma must be > 0");
  if (max_iters < 1) throw InvalidInput("MmrConfig: max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw InvalidInput("MmrConfig: grad_tol must be > 0");
  if (!(loss_rel_tol > 0.0)) throw InvalidInput("MmrConfig: loss_rel_tol must be > 0");
  if (translation_bound_eta && !(*translation_bound_eta > 0.0)) {
    throw InvalidInput("MmrConfig: translation_bound_eta must be > 0");
  }
  if (!init_pose.is_finite()) throw InvalidInput("MmrConfig: init_pose is not finite");
  if (workers < 1) throw InvalidInput("MmrConfig: workers must be >= 1");
  center_cfg.validate();
}

LossAndGradient loss_and_gradient(const PointCloud& source, const MomentVector& target_moments,
                                  const KernelBasis& basis, const Pose& pose, std::size_t workers) {
  check_basis(target_moments, basis);
  return combine(transformed_moments(basis, source, pose, workers), target_moments);
}

double loss(const PointCloud& source, const MomentVector& target_moments, const KernelBasis& basis, const Pose& pose,
            std::size_t workers) {
  check_basis(target_moments, basis);
  const MomentVector moved = empirical_moments(basis, apply(pose, source), workers);
  return pairwise_sum<double>(0, basis.size(), [&](std::size_t k) {
    const double r = moved.values[k] - target_moments.values[k];
    return r * r;
  });
}

Vector6 loss_gradient(const PointCloud& source, const MomentVector& target_moments, const KernelBasis& basis,
                      const Pose& pose, std::size_t workers) {
  return loss_and_gradient(source, target_moments, basis, pose, workers).gradient;
}

MomentMatchingProblem::MomentMatchingProblem(PointCloud source, const PointCloud& target, KernelBasis basis,
                                             std::size_t workers)
    : source_(std::move(source)),
      basis_(std::move(basis)),
      target_moments_(empirical_moments(basis_, target, workers)),
      workers_(workers) {
  if (source_.empty()) throw InvalidInput("MomentMatchingProblem: source cloud is empty");
}

LossAndGradient MomentMatchingProblem::evaluate(const Pose& pose) const {
  return combine(transformed_moments(basis_, source_, pose, workers_), target_moments_);
}

double resolve_sigma(const MmrConfig& cfg, const PointCloud& target) {
  if (cfg.sigma) return *cfg.sigma;
  const double diag = target.bbox_diagonal();
  if (!(diag > 0.0)) throw DegenerateGeometry("resolve_sigma: target cloud has zero extent");
  return cfg.sigma_scale * diag;
}

KernelBasis build_basis(const PointCloud& target, const MmrConfig& cfg) {
  std::vector<Point3> centers = allocate_centers(target, cfg.center_cfg, cfg.workers);
  return KernelBasis(std::move(centers), resolve_sigma(cfg, target));
}

RegistrationReport register_clouds(const PointCloud& source, const PointCloud& target, const MmrConfig& cfg,
                                   const std::optional<Pose>& truth) {
  cfg.validate();
  if (source.empty()) throw InvalidInput("register: source cloud is empty");
  if (target.empty()) throw InvalidInput("register: target cloud is empty");

  const auto start = std::chrono::steady_clock::now();
  const MomentMatchingProblem problem(source, target, build_basis(target, cfg), cfg.workers);

  Objective objective = [&problem](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const LossAndGradient lg = problem.evaluate(Pose::from_vector(x));
    grad = lg.gradient;
    return lg.loss;
  };

  BfgsOptions options;
  options.max_iters = cfg.max_iters;
  options.grad_tol = cfg.grad_tol;
  options.loss_rel_tol = cfg.loss_rel_tol;
  if (cfg.translation_bound_eta) {
    const double eta = *cfg.translation_bound_eta;
    options.project = [eta](Eigen::VectorXd& x) {
      const double t2 = x.tail<3>().squaredNorm();
      if (t2 <= eta) return false;
      x.tail<3>() *= std::sqrt(eta / t2);
      return true;
    };
  }

  const BfgsResult result = bfgs_minimize(objective, cfg.init_pose.to_vector(), options);

  RegistrationReport report;
  report.estimated_pose = Pose::from_vector(result.x).wrapped();
  report.final_loss = result.f;
  report.iterations = result.iterations;
  report.converged = result.converged();
  report.stop = result.stop;
  report.evaluations = result.evaluations;
  report.bound_projections = result.projections;
  report.num_centers = problem.basis().size();
  report.sigma = problem.basis().sigma();
  report.loss_history = result.loss_history;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (truth) {
    const ErrorPair e = pose_errors(*truth, report.estimated_pose);
    report.translation_error = e.translation_error;
    report.rotation_error = e.rotation_error;
  }
  return report;
}

}  // namespace mmr
