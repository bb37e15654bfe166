#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hawkes {

enum class OptimizeStatus { Converged, MaxIterations, LineSearchFail };

struct OptimizeOptions {
  int max_iterations{500};
  double pg_tolerance{1e-6};  ///< max-norm of the projected gradient
  int history{8};             ///< L-BFGS memory
  int max_line_search{40};    ///< backtracking halvings per iteration
  double armijo{1e-4};
  /// Relative finite-difference step; probes use h = fd_step * max(1, |x|).
  double fd_step{6.0554544523933429e-6};  // cbrt(machine epsilon)
};

struct OptimizeResult {
  Eigen::VectorXd x;
  double f{0.0};
  OptimizeStatus status{OptimizeStatus::MaxIterations};
  int iterations{0};
  long evaluations{0};  ///< objective calls, finite-difference probes included
  double pg_norm{0.0};  ///< final projected-gradient max-norm
};

[[nodiscard]] const char* to_string(OptimizeStatus s);

/// Central finite-difference gradient with bound awareness: a probe that
/// would leave [lower, upper] or lands on a non-finite value falls back to a
/// one-sided difference (zero when both sides are unusable).  `fx` is the
/// objective at x; `evaluations` is incremented per probe.
[[nodiscard]] Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double fx,
                                          const Eigen::VectorXd& lower,
                                          const Eigen::VectorXd& upper, double fd_step,
                                          long& evaluations);

/// Box-constrained quasi-Newton minimizer: limited-memory BFGS directions
/// restricted to the inactive set, projected backtracking line search
/// (Armijo on f(clamp(x + t d)) with the projected step in the sufficient
/// decrease term).  Derivatives come from fd_gradient.  Convergence is
/// declared when the projected gradient's max-norm falls below
/// pg_tolerance.  Progress can also end at the double-precision noise floor
/// of the objective — the line search finds no acceptable step, or two
/// consecutive accepted steps change f by a relative 1e-14 or less — and
/// then the point is reported Converged when the projected gradient is
/// within 10x the tolerance or small enough that the achievable remaining
/// decrease (about pg^2 / (2 curvature)) sits below the objective's rounding
/// noise; otherwise the status is LineSearchFail.
[[nodiscard]] OptimizeResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper,
                                      const OptimizeOptions& options = {});

}  // namespace hawkes
