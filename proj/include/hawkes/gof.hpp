#pragma once

// Goodness-of-fit machinery: the time-rescaling transform, the one-sample
// Kolmogorov-Smirnov test against the unit exponential, and the subsampled
// concatenation protocol that de-biases per-trial p-values.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hawkes/types.hpp"

namespace hawkes {

/// A realization mapped through a compensator.  Under the data-generating
/// parameters the transformed times form a unit-rate Poisson process.
struct RescaledRealization {
  std::vector<double> transformed_times;  ///< nondecreasing, in [0, horizon_mass]
  double horizon_mass = 0.0;              ///< compensator mass at the horizon
};

/// Rescale the superposed process by the full compensator: each event time t_k
/// (any dimension) maps to sum_i Lambda^i(t_k), the mass is sum_i Lambda^i(T).
/// Requires beta_tilde == beta.
RescaledRealization time_rescale(const Realization& r, const KernelParameters& p);

/// Rescale one dimension by its own compensator: own events of `dim` map to
/// Lambda^dim(t_k), the mass is Lambda^dim(T).
RescaledRealization time_rescale_dimension(const Realization& r, const KernelParameters& p,
                                           int dim);

struct KsResult {
  double statistic = 0.0;  ///< D_n
  double p_value = 1.0;    ///< Q(sqrt(n) * D_n), asymptotic Kolmogorov tail
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test of nonnegative increments against the
/// unit exponential distribution 1 - e^{-x}.
KsResult ks_exponential(std::vector<double> increments);

/// How the subsample size grows with the number of trials.
enum class PnRule { Sqrt, TwoThirds };

/// Reduction of "is this a unit-rate Poisson path" to a scalar KS test.
enum class KsReduction {
  Increments,         ///< inter-arrival increments vs Exp(1)  (default)
  UniformOrderStats,  ///< event positions conditioned on the count vs U[0, cut]
};

[[nodiscard]] std::string to_string(PnRule r);
[[nodiscard]] std::string to_string(KsReduction r);
[[nodiscard]] PnRule pn_rule_from_string(const std::string& s);
[[nodiscard]] KsReduction ks_reduction_from_string(const std::string& s);

struct GofOptions {
  PnRule pn_rule = PnRule::Sqrt;
  double theta_frac = 0.9;  ///< truncation fraction of the mean mass, in (0,1)
  KsReduction reduction = KsReduction::Increments;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  ///< repetition index; independent RNG per stream
};

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_points = 0;            ///< points entering the KS statistic
  std::size_t p_n = 0;                 ///< number of subsampled trials
  double mean_mass = 0.0;              ///< M, mean transformed mass of the subsample
  double theta_cut = 0.0;              ///< theta_frac * M
  double truncation = 0.0;             ///< p_n * theta_cut, concatenated-time cutoff
  std::vector<std::size_t> selected;   ///< subsampled trial indices, ascending
};

/// One repetition of the resampling protocol: transform every trial by its own
/// compensator at `theta_hat`, draw p_n trials without replacement, concatenate
/// them in dataset order with cumulative mass shifts, truncate at p_n * theta_cut,
/// and KS-test the truncated point set against a unit-rate Poisson process.
/// The partial increment cut off at the truncation boundary is discarded.
GofResult resampling_gof(const std::vector<Realization>& trials,
                         const KernelParameters& theta_hat, const GofOptions& options);

}  // namespace hawkes
