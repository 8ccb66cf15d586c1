#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace mmr;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("convex quadratic is solved exactly") {
  Eigen::VectorXd a(6);
  a << 1, -2, 3, 0.5, -0.25, 4;
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * (x - a);
    return (x - a).squaredNorm();
  };
  const BfgsResult r = bfgs_minimize(f, Eigen::VectorXd::Zero(6));
  CHECK((r.x - a).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(r.converged());
}

TEST_CASE("ill-conditioned quadratic") {
  Eigen::VectorXd d(6);
  d << 1, 10, 100, 1e3, 1e4, 1e5;
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * d.cwiseProduct(x - Eigen::VectorXd::Ones(6));
    return (x - Eigen::VectorXd::Ones(6)).cwiseAbs2().dot(d);
  };
  const BfgsResult r = bfgs_minimize(f, Eigen::VectorXd::Zero(6));
  CHECK((r.x - Eigen::VectorXd::Ones(6)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Rosenbrock from the classic start") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const BfgsResult r = bfgs_minimize(rosenbrock, x0);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-6);
  CHECK(r.converged());

  SUBCASE("losses never increase") {
    for (std::size_t i = 1; i < r.loss_history.size(); ++i) CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
    CHECK(r.loss_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.f <= r.loss_history.front());
  }
}

TEST_CASE("stationary start returns immediately") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);
  const BfgsResult r = bfgs_minimize(f, x0);
  CHECK(r.iterations == 0);
  CHECK(r.x == x0);
  CHECK(r.stop == BfgsStop::gradient);
  CHECK(r.evaluations == 1);
}

TEST_CASE("iteration budget") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  BfgsOptions opt;
  opt.max_iters = 3;
  const BfgsResult r = bfgs_minimize(rosenbrock, x0, opt);
  CHECK(r.iterations == 3);
  CHECK(r.stop == BfgsStop::max_iters);
  CHECK_FALSE(r.converged());
}

TEST_CASE("non-finite objective raises with the last finite iterate") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * (x - Eigen::VectorXd::Constant(x.size(), 5.0));
    if (x[0] > 0.5) return std::nan("");
    return (x - Eigen::VectorXd::Constant(x.size(), 5.0)).squaredNorm();
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  try {
    bfgs_minimize(f, x0);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.last_x().allFinite());
    CHECK(e.last_x()[0] <= 0.5);
    CHECK(std::isfinite(e.last_f()));
  }

  const Objective bad_start = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g.setConstant(INFINITY);
    return 1.0;
  };
  CHECK_THROWS_AS(bfgs_minimize(bad_start, x0), NumericalFailure);
}

TEST_CASE("projection keeps iterates feasible and is counted") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    Eigen::VectorXd c(2);
    c << 3, 0;
    g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  BfgsOptions opt;
  opt.project = [](Eigen::VectorXd& x) {
    if (x.squaredNorm() <= 1.0) return false;
    x.normalize();
    return true;
  };
  const BfgsResult r = bfgs_minimize(f, Eigen::VectorXd::Zero(2), opt);
  CHECK(r.projections > 0);
  CHECK(r.x.norm() <= 1.0 + 1e-15);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
}

TEST_CASE("stop reasons have names") {
  CHECK(to_string(BfgsStop::gradient) == "gradient");
  CHECK(to_string(BfgsStop::loss_decrease) == "loss_decrease");
  CHECK(to_string(BfgsStop::line_search_stall) == "line_search_stall");
  CHECK(to_string(BfgsStop::max_iters) == "max_iters");
}
