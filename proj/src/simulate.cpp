#include "hawkes/simulate.hpp"

#include <cmath>

#include "hawkes/existence.hpp"

namespace hawkes {

double total_intensity_bound(const IntensityState& s, const KernelParameters& p, double t) {
  const Eigen::Index d = p.dimension();
  if (t < s.time) throw ValidationError("bound requested before the anchor event");
  double bound = 0.0;
  if (p.common_decay()) {
    if (t == s.time) {
      // At the anchor itself the between-events form does not apply yet;
      // bound each dimension by mu + (all accumulated mass + incoming jump)+.
      for (Eigen::Index i = 0; i < d; ++i) {
        double mass = s.eta[i] + s.eta_tilde[i];
        if (s.last_dim >= 0) mass += p.alpha(i, s.last_dim);
        bound += p.mu[i] + std::max(0.0, mass);
      }
      return bound;
    }
    const Eigen::VectorXd lambda = underlying_between(s, p, t);
    for (Eigen::Index i = 0; i < d; ++i) bound += std::max(p.mu[i], lambda[i]);
    return bound;
  }
  const double dt = t - s.time;
  for (Eigen::Index i = 0; i < d; ++i) {
    double recent = s.eta[i];
    if (s.last_dim >= 0) recent += p.alpha(i, s.last_dim);
    const double recent_term = recent * exp_flush(-p.beta[i] * dt);
    const double distant_term = s.eta_tilde[i] * exp_flush(-p.beta_tilde[i] * dt);
    bound += p.mu[i] + std::max(0.0, recent_term) + std::max(0.0, distant_term);
  }
  return bound;
}

Realization simulate(const KernelParameters& p, ModelVariant variant,
                     const SimulateOptions& options) {
  require_valid(p, variant);
  const bool by_horizon = options.horizon > 0.0;
  const bool by_count = options.target_events > 0;
  if (by_horizon == by_count)
    throw ValidationError("exactly one of horizon / target_events must be set");
  if (by_horizon && !std::isfinite(options.horizon))
    throw ValidationError("horizon must be finite");
  if (!options.force) {
    const ExistenceReport report = check_existence(p, variant);
    if (!report.satisfied)
      throw ValidationError(
          "stationarity condition fails (spectral radius " +
          std::to_string(report.spectral_radius) +
          " >= 1); pass force to simulate anyway");
  }

  const Eigen::Index d = p.dimension();
  Rng rng(options.seed, options.stream);
  Realization r;
  r.dimension = d;

  IntensityState state = initial_state(d);
  double t = 0.0;
  std::size_t proposals = 0;
  Eigen::VectorXd lambda(d);
  for (;;) {
    const double bound = total_intensity_bound(state, p, t);
    const double wait = rng.exponential(bound);
    const double candidate = t + wait;
    if (by_horizon && candidate > options.horizon) break;

    ++proposals;
    if (static_cast<double>(proposals) >
        options.proposal_budget_per_unit_time * std::max(1.0, candidate))
      throw NumericalError(
          "proposal budget exhausted at t = " + std::to_string(candidate) +
          " after " + std::to_string(proposals) +
          " candidates; the process appears to explode");

    lambda = underlying_between(state, p, candidate).cwiseMax(0.0);
    const double total = lambda.sum();
    const double u = rng.uniform01();
    t = candidate;
    if (u * bound >= total) continue;  // rejected candidate

    // Accepted: attribute the event to a dimension proportionally to its
    // intensity at the candidate time.
    int dim = static_cast<int>(d) - 1;
    double v = rng.uniform01() * total;
    for (Eigen::Index i = 0; i < d; ++i) {
      v -= lambda[i];
      if (v < 0.0) {
        dim = static_cast<int>(i);
        break;
      }
    }
    state = advance_state(state, p, candidate, dim);
    r.times.push_back(candidate);
    r.dims.push_back(dim);
    if (by_count && r.times.size() >= options.target_events) break;
  }

  r.horizon = by_horizon ? options.horizon : (r.times.empty() ? 1.0 : r.times.back());
  require_valid(r);
  return r;
}

}  // namespace hawkes
