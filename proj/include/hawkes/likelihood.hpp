#pragma once

#include <Eigen/Dense>

#include "hawkes/types.hpp"

namespace hawkes {

/// First time in [t_event, inf) at which dimension i's underlying intensity
/// becomes non-negative on the segment following an event at `t_event`,
/// given the post-event value `underlying_plus` = mu + C (where C is the
/// coefficient of the decaying exponential).  Returns t_event itself when
/// the post-event value is already non-negative; otherwise
/// t_event + log(-C/mu) / beta, the exact zero crossing of
/// mu + C exp(-beta (t - t_event)).
[[nodiscard]] double restart_time(double mu, double beta, double underlying_plus,
                                  double t_event);

/// Exact integral of the positive part of mu + C exp(-beta (t - t_event))
/// over [t_event, t_end], where the intensity is zero before `restart` and
/// positive after:
///
///   mu (t_end - restart) + (C / beta) (exp(-beta (restart - t_event)) -
///                                      exp(-beta (t_end - t_event))).
///
/// Preconditions: t_event <= restart <= t_end (callers clamp the analytic
/// restart time into the segment).
[[nodiscard]] double segment_integral(double mu, double beta, double c, double t_event,
                                      double restart, double t_end);

/// Per-dimension compensator (integrated event intensity) of a realization,
/// evaluated at every event time and at the horizon.  Requires
/// beta_tilde == beta exactly.
struct CompensatorTrace {
  Eigen::MatrixXd cumulative;   ///< n x d; row k holds each dimension's compensator at t_k
  Eigen::VectorXd at_horizon;   ///< per-dimension compensator at the horizon
};

[[nodiscard]] CompensatorTrace compensator(const Realization& r, const KernelParameters& p);

/// Exact log-likelihood: sum over own events of log of the left-limit
/// intensity minus the compensator at the horizon, per dimension.  When some
/// own event has non-positive left-limit intensity the likelihood is -inf;
/// `finite` is false, `offending_event` holds that event's 0-based index and
/// `per_dimension` is unspecified.  Requires beta_tilde == beta exactly.
struct LogLikelihood {
  double total{0.0};
  Eigen::VectorXd per_dimension;
  bool finite{true};
  std::ptrdiff_t offending_event{-1};
};

[[nodiscard]] LogLikelihood log_likelihood(const Realization& r, const KernelParameters& p);

/// Same sweep without input re-validation; used by the fitting loop where
/// the realization is validated once and parameters are generated
/// internally.  `scratch` must outlive the call and is resized as needed.
struct LikelihoodWorkspace {
  Eigen::ArrayXd eta, eta_tilde, eta_aux, decay, lambda_mass;
};

[[nodiscard]] LogLikelihood log_likelihood_unchecked(const Realization& r,
                                                     const KernelParameters& p,
                                                     LikelihoodWorkspace& scratch);

}  // namespace hawkes
