#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "hawkes/optimize.hpp"
#include "hawkes/types.hpp"

using namespace hawkes;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

double rosenbrock(const Eigen::VectorXd& x) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("interior quadratic minimum") {
  auto f = [](const Eigen::VectorXd& x) {
    return 2.0 * (x[0] - 0.3) * (x[0] - 0.3) + 5.0 * (x[1] + 1.2) * (x[1] + 1.2);
  };
  const auto res = minimize(f, vec2(4.0, 4.0), vec2(-10.0, -10.0), vec2(10.0, 10.0));
  CHECK(res.status == OptimizeStatus::Converged);
  CHECK(res.x[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(res.x[1] == doctest::Approx(-1.2).epsilon(1e-6));
  CHECK(res.evaluations > 0);
}

TEST_CASE("active bound is found exactly") {
  auto f = [](const Eigen::VectorXd& x) { return (x[0] + 2.0) * (x[0] + 2.0); };
  Eigen::VectorXd x0(1), lo(1), hi(1);
  x0 << 3.0;
  lo << 0.0;
  hi << 5.0;
  const auto res = minimize(f, x0, lo, hi);
  CHECK(res.status == OptimizeStatus::Converged);
  CHECK(res.x[0] == 0.0);  // pinned at the lower bound, exactly
}

TEST_CASE("Rosenbrock from the classic start") {
  const auto res =
      minimize(rosenbrock, vec2(-1.2, 1.0), vec2(-10.0, -10.0), vec2(10.0, 10.0));
  CHECK(res.status == OptimizeStatus::Converged);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.iterations < 500);
}

TEST_CASE("Rosenbrock with a binding upper bound") {
  // Constrain x1 <= 0.5; the solution slides along that face.  Solve the
  // 1-D reduced problem d/dx [(1-x)^2 + 100(0.5 - x^2)^2] = 0 by bisection
  // as an independent reference.
  auto deriv = [](double x) { return -2.0 * (1.0 - x) - 400.0 * x * (0.5 - x * x); };
  double lo = 0.6, hi = 0.8;
  REQUIRE(deriv(lo) < 0.0);
  REQUIRE(deriv(hi) > 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (deriv(mid) < 0.0 ? lo : hi) = mid;
  }
  const double x_ref = 0.5 * (lo + hi);

  const auto res =
      minimize(rosenbrock, vec2(-1.2, 0.0), vec2(-10.0, -10.0), vec2(10.0, 0.5));
  CHECK(res.status == OptimizeStatus::Converged);
  CHECK(res.x[1] == 0.5);
  CHECK(res.x[0] == doctest::Approx(x_ref).epsilon(1e-5));
}

TEST_CASE("finite-difference gradient accuracy, interior and at bounds") {
  auto f = [](const Eigen::VectorXd& x) { return std::sin(x[0]) + x[1] * x[1] * x[1]; };
  long evals = 0;
  Eigen::VectorXd x = vec2(0.7, 1.3);
  const Eigen::VectorXd lo = vec2(-5.0, -5.0);
  const Eigen::VectorXd hi = vec2(5.0, 5.0);
  OptimizeOptions opt;
  const Eigen::VectorXd g = fd_gradient(f, x, f(x), lo, hi, opt.fd_step, evals);
  CHECK(g[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(3.0 * 1.3 * 1.3).epsilon(1e-8));
  CHECK(evals == 4);

  // At the lower bound only the one-sided probe is available.
  x = vec2(-5.0, 0.0);
  evals = 0;
  const Eigen::VectorXd g2 = fd_gradient(f, x, f(x), lo, hi, opt.fd_step, evals);
  CHECK(g2[0] == doctest::Approx(std::cos(-5.0)).epsilon(1e-4));
  CHECK(evals == 3);
}

TEST_CASE("iteration cap reports max_iterations") {
  OptimizeOptions opt;
  opt.max_iterations = 2;
  const auto res =
      minimize(rosenbrock, vec2(-1.2, 1.0), vec2(-10.0, -10.0), vec2(10.0, 10.0), opt);
  CHECK(res.status == OptimizeStatus::MaxIterations);
  CHECK(res.iterations == 2);
}

TEST_CASE("non-smooth kink is still located accurately") {
  // Central differencing smooths a symmetric kink, so the computed gradient
  // shrinks as the iterate closes in; any terminal status must leave the
  // iterate essentially at the kink.
  auto f = [](const Eigen::VectorXd& x) { return std::abs(x[0] - 0.3); };
  Eigen::VectorXd x0(1), lo(1), hi(1);
  x0 << 2.0;
  lo << -10.0;
  hi << 10.0;
  const auto res = minimize(f, x0, lo, hi);
  CHECK(std::abs(res.x[0] - 0.3) < 1e-8);
}

TEST_CASE("line search reports failure when no descent step is acceptable") {
  // Finite at the start with the whole descent direction non-finite: every
  // backtracked trial is rejected, which must surface as a failure status.
  auto f = [](const Eigen::VectorXd& x) {
    return x[0] < 0.0 ? std::numeric_limits<double>::quiet_NaN() : x[0];
  };
  Eigen::VectorXd x0(1), lo(1), hi(1);
  x0 << 0.0;
  lo << -10.0;
  hi << 10.0;
  const auto res = minimize(f, x0, lo, hi);
  CHECK(res.status == OptimizeStatus::LineSearchFail);
  CHECK(res.x[0] == 0.0);
  CHECK(res.f == 0.0);
}

TEST_CASE("results are bitwise deterministic") {
  const auto a = minimize(rosenbrock, vec2(-1.2, 1.0), vec2(-10.0, -10.0), vec2(10.0, 10.0));
  const auto b = minimize(rosenbrock, vec2(-1.2, 1.0), vec2(-10.0, -10.0), vec2(10.0, 10.0));
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.x[1] == b.x[1]);
  CHECK(a.f == b.f);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("input validation") {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  CHECK_THROWS_AS((void)minimize(f, vec2(0, 0), vec2(1, 1), vec2(-1, -1)), ValidationError);
  Eigen::VectorXd lo(1);
  lo << 0.0;
  CHECK_THROWS_AS((void)minimize(f, vec2(0, 0), lo, lo), ValidationError);
}
