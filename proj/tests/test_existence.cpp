#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hawkes/existence.hpp"
#include "hawkes/rng.hpp"
#include "oracle_helpers.hpp"

using namespace hawkes;

TEST_CASE("l1_max_kernel closed forms") {
  // Equal decays: dominated by the larger jump (positive) or the smaller
  // magnitude (negative).
  CHECK(l1_max_kernel(0.5, 2.0, 0.5, 2.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(l1_max_kernel(-0.6, 2.0, -0.6, 2.0) == doctest::Approx(0.3).epsilon(1e-14));
  // Different decays, one kernel dominating everywhere.
  CHECK(l1_max_kernel(1.0, 1.0, 0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  // Mixed signs: the positive kernel wins pointwise.
  CHECK(l1_max_kernel(1.0, 1.0, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // Zero pairs.
  CHECK(l1_max_kernel(0.0, 1.0, 0.0, 2.0) == 0.0);
  CHECK(l1_max_kernel(0.0, 1.0, -0.3, 2.0) == 0.0);
  CHECK(l1_max_kernel(-0.3, 1.0, 0.0, 2.0) == 0.0);
  CHECK(l1_max_kernel(0.0, 1.0, 0.4, 2.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS((void)l1_max_kernel(1.0, 0.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("l1_max_kernel matches quadrature on random kernel pairs") {
  Rng rng(31, 0);
  for (int rep = 0; rep < 300; ++rep) {
    double a = -1.5 + 3.0 * rng.uniform01();
    double at = -1.5 + 3.0 * rng.uniform01();
    if (rep % 7 == 0) a = 0.0;
    if (rep % 11 == 0) at = 0.0;
    const double b = 0.3 + 3.7 * rng.uniform01();
    const double bt = rep % 3 == 0 ? b : 0.3 + 3.7 * rng.uniform01();

    const double got = l1_max_kernel(a, b, at, bt);
    auto f = [&](double t) {
      return std::abs(std::max(a * std::exp(-b * t), at * std::exp(-bt * t)));
    };
    // The integrand decays at rate >= 0.3; [0, 120] captures the tail far
    // below the comparison tolerance.
    const double want = oracle::integrate(f, 0.0, 120.0, 1e-12);
    CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("bivariate example condition matrix and spectral radius") {
  KernelParameters p = KernelParameters::zeros(2);
  p.mu << 0.7, 1.0;
  p.alpha << 0.2, 0.0, -0.6, 1.2;
  p.beta << 3.0, 2.0;
  p.alpha_tilde = p.alpha;
  p.beta_tilde = p.beta;

  const auto report = check_existence(p, ModelVariant::HP);
  CHECK(report.condition_matrix(0, 0) == doctest::Approx(0.2 / 3.0).epsilon(1e-12));
  CHECK(report.condition_matrix(0, 1) == 0.0);
  CHECK(report.condition_matrix(1, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(report.condition_matrix(1, 1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(report.spectral_radius == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(report.satisfied);
  CHECK(report.theorem == ExistenceTheorem::Spectral);
}

TEST_CASE("spectral radius matches power iteration on random non-negative matrices") {
  Rng rng(77, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = rng.uniform01() < 0.3 ? 0.0 : rng.uniform01();
    const double got = spectral_radius(m);
    const double want = oracle::power_iteration_radius(m);
    CHECK(std::abs(got - want) < 1e-7 * std::max(1.0, want));
  }
}

TEST_CASE("memory-reset models are always admissible, full-memory ones are not") {
  KernelParameters p = KernelParameters::zeros(1);
  p.mu[0] = 1.0;
  p.alpha(0, 0) = 5.0;  // ratio 5 with beta = 1: wildly supercritical
  p.beta[0] = 1.0;
  p.alpha_tilde(0, 0) = 0.0;
  p.beta_tilde[0] = 1.0;

  const auto vm = check_existence(p, ModelVariant::VM);
  CHECK(vm.theorem == ExistenceTheorem::VmBounded);
  CHECK(vm.satisfied);
  CHECK(vm.spectral_radius == doctest::Approx(5.0).epsilon(1e-12));

  const auto gvm = check_existence(p, ModelVariant::GVM);
  CHECK(gvm.theorem == ExistenceTheorem::Spectral);
  CHECK(!gvm.satisfied);

  p.alpha_tilde(0, 0) = 5.0;
  const auto hp = check_existence(p, ModelVariant::HP);
  CHECK(!hp.satisfied);
}

TEST_CASE("vm report ignores alpha_tilde in the condition matrix") {
  KernelParameters p = KernelParameters::zeros(1);
  p.mu[0] = 1.0;
  p.alpha(0, 0) = -0.8;
  p.beta[0] = 2.0;
  const auto vm = check_existence(p, ModelVariant::VM);
  // max(-0.8 exp(-2t), 0) = 0 pointwise.
  CHECK(vm.condition_matrix(0, 0) == 0.0);
  CHECK(vm.spectral_radius == 0.0);
}
