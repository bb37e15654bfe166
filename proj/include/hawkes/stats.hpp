#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hawkes {

// ---------------------------------------------------------------------------
// Special functions (double precision, relative accuracy ~1e-13).

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
[[nodiscard]] double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with nu > 0 degrees of freedom.
[[nodiscard]] double student_t_cdf(double t, double nu);

/// CDF of Fisher's F with (d1, d2) degrees of freedom.
[[nodiscard]] double fisher_f_cdf(double f, double d1, double d2);

/// Upper tail Q(x) = P(K > x) of the asymptotic Kolmogorov distribution.
[[nodiscard]] double kolmogorov_q(double x);

// ---------------------------------------------------------------------------
// Interaction tests.  Each test receives the per-trial estimates of one
// (i, j) pair and returns statistic + p-value; callers attach pair labels
// and run multiple-testing control over pairs.

enum class TestKind { HotellingT2, StudentT, EmpiricalSign };
enum class TestNull { JointZero, TildeZero, EqualMemory, AlphaZero };
enum class CiKind { Asymptotic, Empirical };

[[nodiscard]] std::string to_string(TestKind k);
[[nodiscard]] std::string to_string(TestNull n);
[[nodiscard]] std::string to_string(CiKind c);
[[nodiscard]] CiKind ci_kind_from_string(const std::string& s);

struct PairTest {
  int i{0};  ///< receiving dimension (0-based in memory, 1-based in files)
  int j{0};  ///< acting dimension
  double statistic{0.0};
  double p_value{1.0};
  TestKind kind{TestKind::HotellingT2};
  TestNull null_hyp{TestNull::JointZero};
  bool rejected{false};            ///< filled in by multiple-testing control
  bool covariance_singular{false};  ///< Hotelling fell back to the sign test
  bool zero_variance{false};        ///< degenerate sample handled by convention
};

/// No-interaction test of (alpha, alpha_tilde) = (0, 0).
///
/// Asymptotic: Hotelling's t^2 = n m' S^-1 m over the n paired estimates,
/// with p from t^2 (n-2) / (2 (n-1)) ~ F(2, n-2); requires n >= 3.  A
/// singular sample covariance falls back to the empirical variant and sets
/// covariance_singular.
///
/// Empirical: per-component two-sided sign tests eta = 2 min(k+, k-) / n on
/// the alpha and alpha_tilde samples, Bonferroni-combined:
/// p = min(1, 2 min(eta, eta_tilde)); the statistic is min(eta, eta_tilde).
[[nodiscard]] PairTest test1_joint_zero(const std::vector<double>& alpha_samples,
                                        const std::vector<double>& alpha_tilde_samples,
                                        CiKind kind);

/// Memory-relevance test of alpha_tilde = 0 on the alpha_tilde samples.
/// Asymptotic: one-sample Student t = mean sqrt(n / var), two-sided p with
/// n-1 degrees of freedom (n >= 2).  An exactly constant sample sets
/// zero_variance and returns p = 1 when the constant is 0 and p = 0
/// otherwise.  Empirical: two-sided sign test, p = 2 min(k+, k-) / n, with
/// the statistic min(k+, k-).
[[nodiscard]] PairTest test2_tilde_zero(const std::vector<double>& alpha_tilde_samples,
                                        CiKind kind);

/// Full-memory test of alpha = alpha_tilde, applied to the per-trial
/// differences alpha - alpha_tilde with the same machinery as
/// test2_tilde_zero.
[[nodiscard]] PairTest test3_equal_memory(const std::vector<double>& alpha_samples,
                                          const std::vector<double>& alpha_tilde_samples,
                                          CiKind kind);

/// Support test of alpha = 0 on the alpha samples (used in place of the
/// joint test when the model pins alpha_tilde to alpha or to zero).
[[nodiscard]] PairTest test_alpha_zero(const std::vector<double>& alpha_samples, CiKind kind);

// ---------------------------------------------------------------------------
// Multiple-testing control and descriptive intervals.

struct BhResult {
  std::vector<bool> rejected;
  double threshold{0.0};  ///< largest rejected p-value (0 when none)
  int n_rejected{0};
};

/// Benjamini-Hochberg step-up at level q: with the p-values sorted
/// ascending, find the largest k with p_(k) <= k q / m and reject every
/// hypothesis whose p-value is <= p_(k) (ties share one decision).
[[nodiscard]] BhResult benjamini_hochberg(const std::vector<double>& p_values, double q);

/// Symmetric empirical interval at level eta on n sorted estimates: order
/// statistics floor(eta n / 2) and ceil((1 - eta / 2) n), 1-based, with the
/// 0th order statistic taken as -infinity.
[[nodiscard]] std::pair<double, double> empirical_ci(std::vector<double> samples, double eta);

}  // namespace hawkes
