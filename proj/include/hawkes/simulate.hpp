#pragma once

#include <cstdint>

#include "hawkes/intensity.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

/// Exactly one of `horizon` / `target_events` must be set.  With
/// `target_events`, simulation stops at the target count and the horizon is
/// the last event time.  `stream` selects a reproducible substream of
/// `seed`: realization r is bit-identical no matter how work is scheduled.
struct SimulateOptions {
  double horizon{0.0};
  std::size_t target_events{0};
  std::uint64_t seed{0};
  std::uint64_t stream{0};
  bool force{false};  ///< simulate even when the stationarity check fails
  double proposal_budget_per_unit_time{1e7};
};

/// Upper bound on the total event intensity for all times >= t, valid until
/// the next event.  Under a common decay rate each dimension's underlying
/// intensity relaxes monotonically toward mu, so the bound is
/// max(mu_i, lambda*_i(t)); otherwise the positive parts of the two
/// exponential terms at t bound their future values.
[[nodiscard]] double total_intensity_bound(const IntensityState& s, const KernelParameters& p,
                                           double t);

/// Ogata thinning.  Candidates arrive at the current bound's rate, are
/// accepted with probability (sum_i lambda_i) / bound, and the bound is
/// recomputed after every candidate.  Throws ValidationError when the
/// stationarity check fails for hp/gvm (unless `force`) and NumericalError
/// when the proposal budget is exhausted (explosion guard).
[[nodiscard]] Realization simulate(const KernelParameters& p, ModelVariant variant,
                                   const SimulateOptions& options);

}  // namespace hawkes
