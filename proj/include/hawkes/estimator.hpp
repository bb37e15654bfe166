#pragma once

// Maximum-likelihood fitting of one realization under an entry-wise
// constraint mask, and the five-step structural estimation pipeline over a
// set of independent trials (fit, support test, refit, memory-type tests,
// final refit, aggregate).

#include <cstdint>
#include <optional>
#include <vector>

#include "hawkes/optimize.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

struct FitOptions {
  OptimizeOptions optimizer{};
  double mu_floor{1e-8};   ///< lower bound on baselines
  double beta_floor{1e-4};  ///< lower bound on decay rates
  double beta_cap{1e4};     ///< upper bound on decay rates
  int multi_start{1};       ///< number of starts; > 1 adds seeded jitter
  std::uint64_t seed{0};    ///< jitter seed (unused when multi_start == 1)
};

struct FitResult {
  KernelParameters theta_hat;  ///< satisfies the mask exactly (bitwise)
  double neg_loglik{0.0};
  OptimizeStatus status{OptimizeStatus::MaxIterations};
  int iterations{0};
  long n_evals{0};
  std::uint64_t seed_of_init{0};  ///< index of the winning start
};

/// Minimize the negative log-likelihood of `r` over the parameters left free
/// by `mask`, under bounds mu >= mu_floor, beta in [beta_floor, beta_cap]
/// (beta_tilde is tied to beta; the exact likelihood requires a common
/// decay).  Zero entries are pinned to 0, Equal entries share one variable,
/// TildeZero pins alpha_tilde to 0.  When `init` is absent the start is
/// mu_i = N^i(T)/T, beta = 1, alpha = alpha_tilde = 0.  Optimizer failure is
/// reported in `status`, never thrown.  Deterministic given data and options.
[[nodiscard]] FitResult fit(const Realization& r, const MaskMatrix& mask,
                            const std::optional<KernelParameters>& init = std::nullopt,
                            const FitOptions& options = {});

/// Negative log-likelihood of a parameter set summed over trials (+infinity
/// when any trial's likelihood is -infinity).
[[nodiscard]] double total_neg_loglik(const std::vector<Realization>& trials,
                                      const KernelParameters& p);

struct PipelineOptions {
  ModelVariant variant{ModelVariant::GVM};  ///< base model class fitted in Step 1
  double q{0.05};                           ///< false-discovery level for the tests
  CiKind ci{CiKind::Asymptotic};
  FitOptions fit_options{};
  int threads{1};
  bool compute_pooled_aggregate{false};  ///< also minimize the summed objective
};

struct PipelineResult {
  ModelVariant variant{ModelVariant::GVM};

  MaskMatrix mask_step1;  ///< base mask from the variant
  MaskMatrix mask_step3;  ///< after Step-2 support pruning
  MaskMatrix mask_step5;  ///< after Step-4 memory-type decisions (GVM only)

  std::vector<FitResult> step1;  ///< per-trial free fits
  std::vector<FitResult> step3;  ///< per-trial fits on the pruned support
  std::vector<FitResult> step5;  ///< per-trial final fits (empty for HP / VM)

  /// Step 2: one support test per ordered pair (i, j), row-major, with
  /// Benjamini-Hochberg `rejected` flags (non-rejected pairs are zeroed).
  std::vector<PairTest> step2_tests;
  BhResult step2_bh;

  /// Step 4 (GVM only): memory-relevance (alpha_tilde = 0) and full-memory
  /// (alpha = alpha_tilde) tests over the surviving pairs, each family
  /// corrected separately.
  std::vector<PairTest> step4_memory_tests;
  BhResult step4_memory_bh;
  std::vector<PairTest> step4_equal_tests;
  BhResult step4_equal_bh;

  /// Coordinate-wise mean of the final per-trial estimates (the default
  /// aggregate).  Mask constraints hold exactly.
  KernelParameters aggregate;

  /// Optional pooled aggregate: one parameter set minimizing the summed
  /// negative log-likelihood, warm-started at `aggregate`.
  bool has_pooled{false};
  KernelParameters pooled;
  double pooled_neg_loglik{0.0};
  OptimizeStatus pooled_status{OptimizeStatus::MaxIterations};

  /// Final per-trial fits: Step 5 when it ran, Step 3 otherwise.
  [[nodiscard]] const std::vector<FitResult>& final_fits() const {
    return step5.empty() ? step3 : step5;
  }
  [[nodiscard]] const MaskMatrix& final_mask() const {
    return step5.empty() ? mask_step3 : mask_step5;
  }
};

/// Run the structural estimation pipeline on n >= 3 trials of equal
/// dimension.  GVM executes all five steps; HP and VM execute Steps 1-3
/// (their memory type is fixed, so the support test uses the plain
/// alpha = 0 null).  Deterministic given trials and options, for any thread
/// count.
[[nodiscard]] PipelineResult run_pipeline(const std::vector<Realization>& trials,
                                          const PipelineOptions& options = {});

}  // namespace hawkes
