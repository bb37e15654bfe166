#pragma once

#include <Eigen/Dense>

#include "hawkes/types.hpp"

namespace hawkes {

/// exp(x) with arguments below -700 flushed to exactly 0 (avoids denormals;
/// the true value is < 1e-304 and irrelevant at our tolerances).
[[nodiscard]] inline double exp_flush(double x) {
  return x < -700.0 ? 0.0 : std::exp(x);
}

/// Sufficient statistics of the underlying intensity at the time of the most
/// recent event (the "anchor").  For each receiving dimension i,
///
///   underlying(i, t) = mu(i) + eta(i) + eta_tilde(i)        evaluated AT the
///                                                           anchor, and
///
/// between events the three accumulators decay exponentially while the
/// anchor event's own kernel joins the recent past (see
/// underlying_between).  `eta` carries recent-past mass (events since the
/// last own event of i), `eta_tilde` distant-past mass (events before it),
/// and `eta_aux` the recent-past mass measured at the distant-past decay
/// rate — the quantity that migrates into `eta_tilde` when dimension i next
/// jumps and its memory resets.
struct IntensityState {
  double time{0.0};
  int last_dim{-1};  ///< dimension of the anchor event, -1 before any event
  Eigen::ArrayXd eta;
  Eigen::ArrayXd eta_tilde;
  Eigen::ArrayXd eta_aux;
};

/// State at time 0 with no events yet.
[[nodiscard]] IntensityState initial_state(Eigen::Index d);

/// Underlying (possibly negative) intensity vector at t strictly after the
/// anchor and no later than the next event:
///
///   lambda*(i, t) = mu(i) + [eta(i) + alpha(i, last)] * exp(-beta(i) dt)
///                 + eta_tilde(i) * exp(-beta_tilde(i) dt),   dt = t - anchor,
///
/// with the alpha term absent before the first event.  Evaluating at the
/// next event's time gives that event's left limit.
[[nodiscard]] Eigen::VectorXd underlying_between(const IntensityState& s,
                                                 const KernelParameters& p, double t);

/// Event intensity: positive part of underlying_between.
[[nodiscard]] Eigen::VectorXd intensity_between(const IntensityState& s,
                                                const KernelParameters& p, double t);

/// Advances the state across the event (t, dim): decays all accumulators,
/// folds the anchor event's kernels into them, and resets dimension `dim`'s
/// recent past (its accumulated mass, measured at the distant-past decay
/// rate, migrates into eta_tilde).  The new event itself enters the
/// accumulators only on the next advance.
[[nodiscard]] IntensityState advance_state(const IntensityState& s, const KernelParameters& p,
                                           double t, int dim);

/// Underlying intensity vector evaluated exactly at the anchor event's time:
/// mu + eta + eta_tilde.  For dimensions other than the anchor's this equals
/// the left limit; for the anchor dimension it reflects the memory reset.
[[nodiscard]] Eigen::VectorXd underlying_at_anchor(const IntensityState& s,
                                                   const KernelParameters& p);

/// Left limits and at-event values of the underlying intensity at every
/// event of a realization, plus the state after the final event.  Row k of
/// the matrices corresponds to event k.
struct ReplayResult {
  Eigen::MatrixXd left_limits;
  Eigen::MatrixXd at_event;
  IntensityState final_state;
};

[[nodiscard]] ReplayResult replay(const Realization& r, const KernelParameters& p);

}  // namespace hawkes
