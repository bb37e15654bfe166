#include "hawkes/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hawkes/likelihood.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Maps the free parameters selected by a mask to a flat variable vector.
/// Layout: [mu_0..mu_{d-1}] [beta_0..beta_{d-1}] [alpha vars] [alpha_tilde
/// vars].  Equal pairs share the alpha variable; beta_tilde is tied to beta.
struct Packing {
  Eigen::Index d{0};
  MaskMatrix mask;
  std::vector<std::pair<int, int>> alpha_vars;        ///< mask != Zero
  std::vector<std::pair<int, int>> alpha_tilde_vars;  ///< mask == Free

  explicit Packing(const MaskMatrix& m) : d(m.rows()), mask(m) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (mask(i, j) != MaskTag::Zero) alpha_vars.emplace_back(i, j);
        if (mask(i, j) == MaskTag::Free) alpha_tilde_vars.emplace_back(i, j);
      }
    }
  }

  [[nodiscard]] Eigen::Index n_vars() const {
    return 2 * d + static_cast<Eigen::Index>(alpha_vars.size() + alpha_tilde_vars.size());
  }

  [[nodiscard]] Eigen::VectorXd pack(const KernelParameters& p) const {
    Eigen::VectorXd x(n_vars());
    x.head(d) = p.mu;
    x.segment(d, d) = p.beta;
    Eigen::Index v = 2 * d;
    for (const auto& [i, j] : alpha_vars) x[v++] = p.alpha(i, j);
    for (const auto& [i, j] : alpha_tilde_vars) x[v++] = p.alpha_tilde(i, j);
    return x;
  }

  void unpack(const Eigen::VectorXd& x, KernelParameters& p) const {
    p.mu = x.head(d);
    p.beta = x.segment(d, d);
    p.beta_tilde = p.beta;
    p.alpha.setZero(d, d);
    p.alpha_tilde.setZero(d, d);
    Eigen::Index v = 2 * d;
    for (const auto& [i, j] : alpha_vars) {
      p.alpha(i, j) = x[v];
      if (mask(i, j) == MaskTag::Equal) p.alpha_tilde(i, j) = x[v];
      ++v;
    }
    for (const auto& [i, j] : alpha_tilde_vars) p.alpha_tilde(i, j) = x[v++];
    p.mask = mask;
  }

  [[nodiscard]] Eigen::VectorXd lower(const FitOptions& o) const {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(n_vars(), -kInf);
    lo.head(d).setConstant(o.mu_floor);
    lo.segment(d, d).setConstant(o.beta_floor);
    return lo;
  }

  [[nodiscard]] Eigen::VectorXd upper(const FitOptions& o) const {
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(n_vars(), kInf);
    hi.segment(d, d).setConstant(o.beta_cap);
    return hi;
  }
};

KernelParameters default_init(const Realization& r, const FitOptions& o) {
  KernelParameters p = KernelParameters::zeros(r.dimension);
  const Eigen::VectorXi counts = per_dimension_counts(r);
  for (Eigen::Index i = 0; i < r.dimension; ++i)
    p.mu[i] = std::max(static_cast<double>(counts[i]) / r.horizon, o.mu_floor);
  return p;
}

void require_same_shape(const Realization& r, const MaskMatrix& mask) {
  require_valid(r);
  if (mask.rows() != r.dimension || mask.cols() != r.dimension)
    throw ValidationError("fit: mask shape does not match the realization dimension");
}

MaskMatrix base_mask(Eigen::Index d, ModelVariant variant) {
  MaskTag tag = MaskTag::Free;
  if (variant == ModelVariant::HP) tag = MaskTag::Equal;
  if (variant == ModelVariant::VM) tag = MaskTag::TildeZero;
  return MaskMatrix::Constant(d, d, tag);
}

}  // namespace

FitResult fit(const Realization& r, const MaskMatrix& mask,
              const std::optional<KernelParameters>& init, const FitOptions& options) {
  require_same_shape(r, mask);
  if (options.multi_start < 1) throw ValidationError("fit: multi_start must be >= 1");

  const Packing packing(mask);
  const Eigen::VectorXd lo = packing.lower(options);
  const Eigen::VectorXd hi = packing.upper(options);

  KernelParameters scratch = KernelParameters::zeros(r.dimension);
  scratch.mask = mask;
  LikelihoodWorkspace workspace;
  auto objective = [&](const Eigen::VectorXd& x) {
    packing.unpack(x, scratch);
    const LogLikelihood ll = log_likelihood_unchecked(r, scratch, workspace);
    return ll.finite ? -ll.total : kInf;
  };

  KernelParameters start_params = init ? *init : default_init(r, options);
  if (start_params.dimension() != r.dimension)
    throw ValidationError("fit: init dimension does not match the realization");
  const Eigen::VectorXd x0 = packing.pack(start_params);

  FitResult best;
  best.neg_loglik = kInf;
  long total_evals = 0;
  auto attempt = [&](const Eigen::VectorXd& xs, std::uint64_t label) {
    OptimizeResult res;
    try {
      res = minimize(objective, xs, lo, hi, options.optimizer);
    } catch (const NumericalError&) {
      return;  // non-finite at the start; the caller tries another one
    }
    total_evals += res.evaluations;
    if (res.f < best.neg_loglik) {
      best.neg_loglik = res.f;
      best.status = res.status;
      best.iterations = res.iterations;
      best.seed_of_init = label;
      best.theta_hat = KernelParameters::zeros(r.dimension);
      packing.unpack(res.x, best.theta_hat);
    }
  };

  for (int s = 0; s < options.multi_start; ++s) {
    Eigen::VectorXd xs = x0;
    if (s > 0) {
      // Multiplicative jitter on the positive block, additive on the rest.
      Rng rng(options.seed, static_cast<std::uint64_t>(s));
      for (Eigen::Index i = 0; i < packing.d; ++i) xs[i] *= std::exp(0.3 * rng.normal());
      for (Eigen::Index i = packing.d; i < 2 * packing.d; ++i)
        xs[i] *= std::exp(0.5 * rng.normal());
      for (Eigen::Index i = 2 * packing.d; i < xs.size(); ++i) xs[i] += 0.1 * rng.normal();
    }
    attempt(xs, static_cast<std::uint64_t>(s));
  }
  if (!std::isfinite(best.neg_loglik) && init) {
    // A supplied warm start can be infeasible under a changed mask; the
    // zero-interaction default never is.
    attempt(packing.pack(default_init(r, options)),
            static_cast<std::uint64_t>(options.multi_start));
  }
  best.n_evals = total_evals;
  if (!std::isfinite(best.neg_loglik))
    throw NumericalError("fit: no start produced a finite objective");
  return best;
}

double total_neg_loglik(const std::vector<Realization>& trials, const KernelParameters& p) {
  double total = 0.0;
  for (const Realization& r : trials) {
    const LogLikelihood ll = log_likelihood(r, p);
    if (!ll.finite) return kInf;
    total -= ll.total;
  }
  return total;
}

namespace {

std::vector<FitResult> fit_all(const std::vector<Realization>& trials, const MaskMatrix& mask,
                               const std::vector<const KernelParameters*>& inits,
                               const PipelineOptions& options) {
  std::vector<FitResult> fits(trials.size());
  parallel_for(trials.size(), static_cast<unsigned>(std::max(1, options.threads)),
               [&](std::size_t k) {
                 std::optional<KernelParameters> init;
                 if (!inits.empty() && inits[k] != nullptr) init = *inits[k];
                 fits[k] = fit(trials[k], mask, init, options.fit_options);
               });
  return fits;
}

std::vector<double> collect_alpha(const std::vector<FitResult>& fits, int i, int j) {
  std::vector<double> out;
  out.reserve(fits.size());
  for (const FitResult& f : fits) out.push_back(f.theta_hat.alpha(i, j));
  return out;
}

std::vector<double> collect_alpha_tilde(const std::vector<FitResult>& fits, int i, int j) {
  std::vector<double> out;
  out.reserve(fits.size());
  for (const FitResult& f : fits) out.push_back(f.theta_hat.alpha_tilde(i, j));
  return out;
}

KernelParameters mean_aggregate(const std::vector<FitResult>& fits, const MaskMatrix& mask) {
  const Eigen::Index d = fits.front().theta_hat.dimension();
  KernelParameters agg = KernelParameters::zeros(d);
  agg.mu.setZero();
  agg.beta.setZero();
  for (const FitResult& f : fits) {
    agg.mu += f.theta_hat.mu;
    agg.alpha += f.theta_hat.alpha;
    agg.beta += f.theta_hat.beta;
    agg.alpha_tilde += f.theta_hat.alpha_tilde;
  }
  const double n = static_cast<double>(fits.size());
  agg.mu /= n;
  agg.alpha /= n;
  agg.beta /= n;
  agg.alpha_tilde /= n;
  agg.beta_tilde = agg.beta;
  agg.mask = mask;
  return agg;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<Realization>& trials,
                            const PipelineOptions& options) {
  if (trials.size() < 3)
    throw ValidationError("run_pipeline: at least three trials are required");
  const Eigen::Index d = trials.front().dimension;
  for (const Realization& r : trials) {
    require_valid(r);
    if (r.dimension != d)
      throw ValidationError("run_pipeline: trials have inconsistent dimensions");
  }
  if (!(options.q > 0.0 && options.q < 1.0))
    throw ValidationError("run_pipeline: q must lie in (0, 1)");

  PipelineResult out;
  out.variant = options.variant;
  out.mask_step1 = base_mask(d, options.variant);

  // Step 1: unconstrained fit of the base model class, every trial.
  out.step1 = fit_all(trials, out.mask_step1, {}, options);

  // Step 2: support tests per ordered pair, Benjamini-Hochberg over all d^2
  // p-values; pairs whose null survives are zeroed.
  std::vector<double> p_values;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      PairTest t;
      if (options.variant == ModelVariant::GVM) {
        t = test1_joint_zero(collect_alpha(out.step1, i, j),
                             collect_alpha_tilde(out.step1, i, j), options.ci);
      } else {
        t = test_alpha_zero(collect_alpha(out.step1, i, j), options.ci);
      }
      t.i = i;
      t.j = j;
      out.step2_tests.push_back(t);
      p_values.push_back(t.p_value);
    }
  }
  out.step2_bh = benjamini_hochberg(p_values, options.q);
  out.mask_step3 = out.mask_step1;
  for (std::size_t k = 0; k < out.step2_tests.size(); ++k) {
    out.step2_tests[k].rejected = out.step2_bh.rejected[k];
    if (!out.step2_bh.rejected[k])
      out.mask_step3(out.step2_tests[k].i, out.step2_tests[k].j) = MaskTag::Zero;
  }

  // Step 3: refit on the pruned support, warm-started at the Step-1 optima.
  {
    std::vector<const KernelParameters*> warm(trials.size());
    for (std::size_t k = 0; k < trials.size(); ++k) warm[k] = &out.step1[k].theta_hat;
    out.step3 = fit_all(trials, out.mask_step3, warm, options);
  }

  if (options.variant == ModelVariant::GVM) {
    // Step 4: memory-type tests on the surviving pairs, one Benjamini-
    // Hochberg family per test.
    std::vector<std::pair<int, int>> survivors;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (out.mask_step3(i, j) != MaskTag::Zero) survivors.emplace_back(i, j);
      }
    }
    std::vector<double> p_memory, p_equal;
    for (const auto& [i, j] : survivors) {
      PairTest t2 = test2_tilde_zero(collect_alpha_tilde(out.step3, i, j), options.ci);
      t2.i = i;
      t2.j = j;
      out.step4_memory_tests.push_back(t2);
      p_memory.push_back(t2.p_value);

      PairTest t3 = test3_equal_memory(collect_alpha(out.step3, i, j),
                                       collect_alpha_tilde(out.step3, i, j), options.ci);
      t3.i = i;
      t3.j = j;
      out.step4_equal_tests.push_back(t3);
      p_equal.push_back(t3.p_value);
    }
    out.step4_memory_bh = benjamini_hochberg(p_memory, options.q);
    out.step4_equal_bh = benjamini_hochberg(p_equal, options.q);

    out.mask_step5 = out.mask_step3;
    for (std::size_t k = 0; k < survivors.size(); ++k) {
      const auto [i, j] = survivors[k];
      const bool memory_matters = out.step4_memory_bh.rejected[k];  // alpha_tilde != 0
      const bool memories_differ = out.step4_equal_bh.rejected[k];  // alpha != alpha_tilde
      out.step4_memory_tests[k].rejected = memory_matters;
      out.step4_equal_tests[k].rejected = memories_differ;
      if (memory_matters && memories_differ) {
        out.mask_step5(i, j) = MaskTag::Free;
      } else if (memory_matters) {
        out.mask_step5(i, j) = MaskTag::Equal;
      } else if (memories_differ) {
        out.mask_step5(i, j) = MaskTag::TildeZero;
      } else {
        // Neither null rejected: apply the one with the weaker evidence
        // against it (larger p-value); ties go to the memory-reset form.
        out.mask_step5(i, j) = (out.step4_memory_tests[k].p_value >=
                                out.step4_equal_tests[k].p_value)
                                   ? MaskTag::TildeZero
                                   : MaskTag::Equal;
      }
    }

    // Step 5: final refit under the structural decisions.
    std::vector<const KernelParameters*> warm(trials.size());
    for (std::size_t k = 0; k < trials.size(); ++k) warm[k] = &out.step3[k].theta_hat;
    out.step5 = fit_all(trials, out.mask_step5, warm, options);
  } else {
    out.mask_step5 = out.mask_step3;
  }

  out.aggregate = mean_aggregate(out.final_fits(), out.final_mask());

  if (options.compute_pooled_aggregate) {
    // One parameter set for all trials: minimize the summed objective,
    // warm-started at the mean aggregate.  Per-trial terms are computed into
    // fixed slots and summed in trial order so the result does not depend on
    // the thread count.
    const Packing packing(out.final_mask());
    const unsigned pool_threads = static_cast<unsigned>(std::max(1, options.threads));
    auto objective = [&](const Eigen::VectorXd& x) {
      KernelParameters p = KernelParameters::zeros(d);
      packing.unpack(x, p);
      std::vector<double> terms(trials.size());
      parallel_for(trials.size(), pool_threads, [&](std::size_t k) {
        LikelihoodWorkspace ws;  // cheap relative to the sweep itself
        const LogLikelihood ll = log_likelihood_unchecked(trials[k], p, ws);
        terms[k] = ll.finite ? -ll.total : kInf;
      });
      double total = 0.0;
      for (double v : terms) total += v;
      return total;
    };
    OptimizeResult res;
    try {
      res = minimize(objective, packing.pack(out.aggregate), packing.lower(options.fit_options),
                     packing.upper(options.fit_options), options.fit_options.optimizer);
    } catch (const NumericalError&) {
      // The averaged warm start can make some trial impossible (an event with
      // non-positive intensity under the averaged inhibitory kernels).  Keep
      // the averaged rates and decays but shrink the kernels until every
      // trial is possible; zero interactions always are.
      KernelParameters fallback = out.aggregate;
      for (double scale : {0.5, 0.25, 0.1, 0.0}) {
        fallback.alpha = out.aggregate.alpha * scale;
        fallback.alpha_tilde = out.aggregate.alpha_tilde * scale;
        if (std::isfinite(objective(packing.pack(fallback)))) break;
      }
      res = minimize(objective, packing.pack(fallback), packing.lower(options.fit_options),
                     packing.upper(options.fit_options), options.fit_options.optimizer);
    }
    out.has_pooled = true;
    out.pooled = KernelParameters::zeros(d);
    packing.unpack(res.x, out.pooled);
    out.pooled_neg_loglik = res.f;
    out.pooled_status = res.status;
  }

  return out;
}

}  // namespace hawkes
