#include "hawkes/existence.hpp"

#include <cmath>

namespace hawkes {

namespace {

/// integral_s^inf a exp(-b t) dt
double tail(double a, double b, double s) { return a / b * std::exp(-b * s); }

/// integral_0^s a exp(-b t) dt
double head(double a, double b, double s) { return a / b * (1.0 - std::exp(-b * s)); }

}  // namespace

double l1_max_kernel(double a, double b, double at, double bt) {
  if (!(b > 0.0) || !(bt > 0.0))
    throw ValidationError("decay rates must be positive in l1_max_kernel");
  if (a == 0.0 && at == 0.0) return 0.0;
  // A positive kernel dominates a non-positive one everywhere; the max of a
  // zero and a negative kernel is identically zero.
  if (a > 0.0 && at <= 0.0) return a / b;
  if (at > 0.0 && a <= 0.0) return at / bt;
  if (a == 0.0 || at == 0.0) return 0.0;  // remaining mixed-zero cases are negative

  const bool positive = a > 0.0;
  const double mag_a = std::abs(a);
  const double mag_at = std::abs(at);
  if (b == bt) {
    // Same decay: one kernel dominates everywhere.  For positive pairs the
    // max is the larger jump; for negative pairs it is the one of smaller
    // magnitude.
    return (positive ? std::max(mag_a, mag_at) : std::min(mag_a, mag_at)) / b;
  }

  // Both kernels share a sign and decay at different rates: their magnitudes
  // cross exactly once, at tc (possibly <= 0).  After the crossing the
  // slower-decaying magnitude is the larger one.
  const double tc = (std::log(mag_a) - std::log(mag_at)) / (b - bt);
  // For positive pairs the max is the larger magnitude; for negative pairs
  // |max| is the smaller magnitude.
  const bool late_is_slow = positive;
  const bool first_is_a = late_is_slow ? (b < bt ? false : true) : (b < bt ? true : false);
  // first_is_a: does kernel a supply the integrand on (0, tc)?
  //   positive pair: before the crossing the faster-decaying one is larger.
  //   negative pair: before the crossing the faster-decaying one is smaller.
  if (tc <= 0.0) {
    // No crossing on (0, inf): the (0, tc) winner never applies.
    return first_is_a ? mag_at / bt : mag_a / b;
  }
  const double first_mag = first_is_a ? mag_a : mag_at;
  const double first_rate = first_is_a ? b : bt;
  const double second_mag = first_is_a ? mag_at : mag_a;
  const double second_rate = first_is_a ? bt : b;
  return head(first_mag, first_rate, tc) + tail(second_mag, second_rate, tc);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError("spectral radius requires a non-empty square matrix");
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation failed in spectral_radius");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ExistenceReport check_existence(const KernelParameters& p, ModelVariant variant) {
  require_valid(p, variant);
  const Eigen::Index d = p.dimension();
  ExistenceReport report;
  report.condition_matrix.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double at = variant == ModelVariant::VM ? 0.0 : p.alpha_tilde(i, j);
      report.condition_matrix(i, j) = l1_max_kernel(p.alpha(i, j), p.beta[i], at, p.beta_tilde[i]);
    }
  }
  report.spectral_radius = spectral_radius(report.condition_matrix);
  if (variant == ModelVariant::VM) {
    report.theorem = ExistenceTheorem::VmBounded;
    report.satisfied = true;
  } else {
    report.theorem = ExistenceTheorem::Spectral;
    report.satisfied = report.spectral_radius < 1.0;
  }
  return report;
}

}  // namespace hawkes
