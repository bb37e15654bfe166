#include "hawkes/gof.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>

#include "hawkes/likelihood.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/stats.hpp"

namespace hawkes {

std::string to_string(PnRule r) { return r == PnRule::Sqrt ? "sqrt" : "two_thirds"; }

std::string to_string(KsReduction r) {
  return r == KsReduction::Increments ? "increments" : "uniform_order_stats";
}

namespace {

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

PnRule pn_rule_from_string(const std::string& s) {
  const std::string v = ascii_lower(s);
  if (v == "sqrt") return PnRule::Sqrt;
  if (v == "two_thirds") return PnRule::TwoThirds;
  throw ValidationError("unknown subsample-size rule '" + s + "'");
}

KsReduction ks_reduction_from_string(const std::string& s) {
  const std::string v = ascii_lower(s);
  if (v == "increments") return KsReduction::Increments;
  if (v == "uniform_order_stats") return KsReduction::UniformOrderStats;
  throw ValidationError("unknown KS reduction '" + s + "'");
}

RescaledRealization time_rescale(const Realization& r, const KernelParameters& p) {
  const CompensatorTrace trace = compensator(r, p);
  RescaledRealization out;
  out.transformed_times.reserve(r.size());
  for (Eigen::Index k = 0; k < trace.cumulative.rows(); ++k)
    out.transformed_times.push_back(trace.cumulative.row(k).sum());
  out.horizon_mass = trace.at_horizon.sum();
  return out;
}

RescaledRealization time_rescale_dimension(const Realization& r, const KernelParameters& p,
                                           int dim) {
  if (dim < 0 || dim >= r.dimension)
    throw ValidationError("time_rescale_dimension: dimension index out of range");
  const CompensatorTrace trace = compensator(r, p);
  RescaledRealization out;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r.dims[k] == dim)
      out.transformed_times.push_back(trace.cumulative(static_cast<Eigen::Index>(k), dim));
  }
  out.horizon_mass = trace.at_horizon[dim];
  return out;
}

namespace {

/// KS distance between the sorted values `u` (already mapped through the
/// hypothesized c.d.f., so uniform under the null) and U[0,1].
double ks_distance_uniformized(const std::vector<double>& u) {
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double lo = static_cast<double>(k) / n;
    const double hi = static_cast<double>(k + 1) / n;
    d = std::max(d, std::max(std::abs(u[k] - lo), std::abs(u[k] - hi)));
  }
  return d;
}

KsResult ks_from_uniformized(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  KsResult res;
  res.n = u.size();
  res.statistic = ks_distance_uniformized(u);
  res.p_value = kolmogorov_q(std::sqrt(static_cast<double>(res.n)) * res.statistic);
  return res;
}

}  // namespace

KsResult ks_exponential(std::vector<double> increments) {
  if (increments.empty()) throw ValidationError("ks_exponential: empty sample");
  for (double x : increments) {
    if (!(x >= 0.0)) throw ValidationError("ks_exponential: negative or NaN increment");
    (void)x;
  }
  for (double& x : increments) x = -std::expm1(-x);  // 1 - e^{-x}
  return ks_from_uniformized(std::move(increments));
}

GofResult resampling_gof(const std::vector<Realization>& trials,
                         const KernelParameters& theta_hat, const GofOptions& options) {
  if (trials.size() < 2)
    throw ValidationError("resampling_gof: need at least two trials");
  if (!(options.theta_frac > 0.0 && options.theta_frac < 1.0))
    throw ValidationError("resampling_gof: theta_frac must lie in (0, 1)");

  const std::size_t n = trials.size();
  std::size_t p_n = 0;
  switch (options.pn_rule) {
    case PnRule::Sqrt:
      p_n = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)) + 1e-9);
      break;
    case PnRule::TwoThirds:
      p_n = static_cast<std::size_t>(std::pow(static_cast<double>(n), 2.0 / 3.0) *
                                         (1.0 + 1e-12) +
                                     1e-9);
      break;
  }
  if (p_n < 1) throw ValidationError("resampling_gof: subsample size is zero");

  GofResult res;
  res.p_n = p_n;

  // Subsample without replacement, then concatenate in dataset order.
  Rng rng(options.seed, options.stream);
  res.selected = rng.sample_without_replacement(n, p_n);
  std::sort(res.selected.begin(), res.selected.end());

  std::vector<double> points;
  double offset = 0.0;
  for (std::size_t idx : res.selected) {
    const RescaledRealization rescaled = time_rescale(trials[idx], theta_hat);
    for (double t : rescaled.transformed_times) points.push_back(offset + t);
    offset += rescaled.horizon_mass;
  }
  res.mean_mass = offset / static_cast<double>(p_n);
  res.theta_cut = options.theta_frac * res.mean_mass;
  res.truncation = static_cast<double>(p_n) * res.theta_cut;

  std::vector<double> kept;
  for (double t : points) {
    if (t <= res.truncation) kept.push_back(t);
  }
  // Concatenation with positive mass shifts preserves ordering across trial
  // boundaries, but assert rather than assume.
  for (std::size_t k = 1; k < kept.size(); ++k) {
    if (kept[k] < kept[k - 1])
      throw NumericalError("resampling_gof: concatenated times are not nondecreasing");
  }

  if (kept.empty()) {
    // No points before the cut: a unit-rate Poisson path with zero events on
    // [0, truncation] has probability e^{-truncation}; report that directly
    // as the tail probability of the observation.
    res.n_points = 0;
    res.statistic = 1.0;
    res.p_value = std::exp(-res.truncation);
    return res;
  }

  KsResult ks;
  switch (options.reduction) {
    case KsReduction::Increments: {
      std::vector<double> increments;
      increments.reserve(kept.size());
      double prev = 0.0;
      for (double t : kept) {
        increments.push_back(t - prev);
        prev = t;
      }
      // The partial increment between the last kept point and the truncation
      // boundary is censored and discarded.
      ks = ks_exponential(std::move(increments));
      break;
    }
    case KsReduction::UniformOrderStats: {
      std::vector<double> u;
      u.reserve(kept.size());
      for (double t : kept) u.push_back(t / res.truncation);
      ks = ks_from_uniformized(std::move(u));
      break;
    }
  }
  res.statistic = ks.statistic;
  res.p_value = ks.p_value;
  res.n_points = ks.n;
  return res;
}

}  // namespace hawkes
