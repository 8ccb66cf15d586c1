#include <mmr/bfgs.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include <mmr/error.hpp>

namespace mmr {

std::string_view to_string(BfgsStop stop) {
  switch (stop) {
    case BfgsStop::gradient: return "gradient";
    case BfgsStop::loss_decrease: return "loss_decrease";
    case BfgsStop::line_search_stall: return "line_search_stall";
    case BfgsStop::max_iters: return "max_iters";
  }
  return "unknown";
}

namespace {

struct Sample {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along p
  Eigen::VectorXd x;
  Eigen::VectorXd g;
};

class Evaluator {
public:
  Evaluator(const Objective& f, BfgsResult& result) : f_(f), result_(result) {}

  Sample at(const Eigen::VectorXd& x) {
    Sample s;
    s.x = x;
    s.g.resize(x.size());
    s.f = f_(x, s.g);
    ++result_.evaluations;
    if (!std::isfinite(s.f) || !s.g.allFinite()) {
      throw NumericalFailure("bfgs_minimize: objective or gradient is not finite", result_.x, result_.f,
                             result_.iterations);
    }
    return s;
  }

  Sample along(const Eigen::VectorXd& x, const Eigen::VectorXd& p, double alpha) {
    Sample s = at(x + alpha * p);
    s.alpha = alpha;
    s.slope = s.g.dot(p);
    return s;
  }

private:
  const Objective& f_;
  BfgsResult& result_;
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or NaN if it does not exist.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

// Strong-Wolfe line search (bracketing phase followed by zoom). Returns the accepted
// sample, or a sample with alpha == 0 when no point with sufficient decrease was found.
Sample wolfe_search(Evaluator& eval, const Sample& origin, const Eigen::VectorXd& p, double alpha0,
                    const BfgsOptions& opt) {
  const double f0 = origin.f;
  const double d0 = origin.slope;
  int budget = opt.max_line_search_evals;

  auto armijo_ok = [&](const Sample& s) { return s.f <= f0 + opt.c1 * s.alpha * d0; };
  auto curvature_ok = [&](const Sample& s) { return std::abs(s.slope) <= -opt.c2 * d0; };

  auto zoom = [&](Sample lo, Sample hi) -> Sample {
    while (budget-- > 0) {
      const double width = hi.alpha - lo.alpha;
      double a = cubic_minimizer(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope);
      const double left = std::min(lo.alpha, hi.alpha) + 0.1 * std::abs(width);
      const double right = std::max(lo.alpha, hi.alpha) - 0.1 * std::abs(width);
      if (!std::isfinite(a) || a < left || a > right) a = 0.5 * (lo.alpha + hi.alpha);
      if (std::abs(width) <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo.alpha))) break;

      Sample s = eval.along(origin.x, p, a);
      if (!armijo_ok(s) || s.f >= lo.f) {
        hi = std::move(s);
      } else {
        if (curvature_ok(s)) return s;
        if (s.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(s);
      }
    }
    // Budget exhausted: lo still satisfies sufficient decrease when alpha > 0.
    return lo;
  };

  Sample prev = origin;
  prev.alpha = 0.0;
  double alpha = alpha0;
  for (int i = 0; budget-- > 0; ++i) {
    Sample s = eval.along(origin.x, p, alpha);
    if (!armijo_ok(s) || (i > 0 && s.f >= prev.f)) return zoom(prev, s);
    if (curvature_ok(s)) return s;
    if (s.slope >= 0.0) return zoom(s, prev);
    prev = std::move(s);
    alpha *= 2.0;
  }
  return prev;
}

}  // namespace

BfgsResult bfgs_minimize(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  BfgsResult result;
  result.x = x0;
  result.f = std::numeric_limits<double>::quiet_NaN();
  Evaluator eval(f, result);

  Sample current = eval.at(x0);
  result.f = current.f;
  result.grad = current.g;
  result.loss_history.push_back(current.f);

  if (current.g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
    result.stop = BfgsStop::gradient;
    return result;
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;
  bool reset_once = false;

  while (result.iterations < opt.max_iters) {
    Eigen::VectorXd p = -h * current.g;
    current.slope = current.g.dot(p);
    if (!(current.slope < 0.0)) {
      h.setIdentity();
      p = -current.g;
      current.slope = current.g.dot(p);
    }

    const double alpha0 = first_update ? std::min(1.0, 1.0 / current.g.lpNorm<Eigen::Infinity>()) : 1.0;
    Sample next = wolfe_search(eval, current, p, alpha0, opt);

    if (next.alpha == 0.0) {
      if (reset_once) {
        result.stop = BfgsStop::line_search_stall;
        break;
      }
      // Retry once along steepest descent with a fresh inverse Hessian.
      h.setIdentity();
      first_update = true;
      reset_once = true;
      continue;
    }
    reset_once = false;

    if (opt.project) {
      Eigen::VectorXd projected = next.x;
      if (opt.project(projected)) {
        ++result.projections;
        next = eval.at(projected);
      }
    }

    const Eigen::VectorXd s = next.x - current.x;
    const Eigen::VectorXd y = next.g - current.g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      if (first_update) {
        h *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h = left * h * left.transpose() + rho * s * s.transpose();
    } else {
      ++result.skipped_updates;
    }

    const double f_prev = current.f;
    current = std::move(next);
    ++result.iterations;
    result.x = current.x;
    result.f = current.f;
    result.grad = current.g;
    result.loss_history.push_back(current.f);

    if (current.g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      result.stop = BfgsStop::gradient;
      break;
    }
    if (f_prev - current.f <= opt.loss_rel_tol * std::max(std::abs(f_prev), std::numeric_limits<double>::min())) {
      result.stop = BfgsStop::loss_decrease;
      break;
    }
  }
  return result;
}

}  // namespace mmr
