#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace mmr {

/// Returns f(x) and writes the gradient into `grad` (already sized like x).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BfgsOptions {
  int max_iters = 200;
  double grad_tol = 1e-9;      ///< stop when |grad|_inf < grad_tol
  double loss_rel_tol = 1e-12; ///< stop when (f_prev - f) <= loss_rel_tol * |f_prev|
  double c1 = 1e-4;            ///< sufficient decrease
  double c2 = 0.9;             ///< curvature
  int max_line_search_evals = 40;
  /// Optional feasibility projection applied after each line-search step.
  /// Returns true when it moved the point.
  std::function<bool(Eigen::VectorXd&)> project;
};

enum class BfgsStop {
  gradient,           ///< gradient tolerance met
  loss_decrease,      ///< relative loss decrease below tolerance
  line_search_stall,  ///< no descent possible along the quasi-Newton or steepest direction
  max_iters,
};

std::string_view to_string(BfgsStop stop);

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  int evaluations = 0;
  int skipped_updates = 0;
  int projections = 0;
  BfgsStop stop = BfgsStop::max_iters;
  /// f at x0 followed by f after every accepted iteration.
  std::vector<double> loss_history;

  /// True unless the iteration budget ran out.
  bool converged() const { return stop != BfgsStop::max_iters; }
};

/// Dense BFGS with a strong-Wolfe line search. The inverse Hessian starts at the identity
/// and is rescaled by y's/y'y before the first update; updates with y's <= 0 are skipped.
/// Throws NumericalFailure, carrying the last finite iterate, if f or its gradient is not finite.
BfgsResult bfgs_minimize(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options = {});

}  // namespace mmr
