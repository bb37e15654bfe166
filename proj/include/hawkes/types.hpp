#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkes {

/// Raised when inputs violate a documented precondition (bad parameters,
/// malformed files, inconsistent dimensions).  The CLI maps it to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a computation fails numerically (explosion budget exceeded,
/// optimizer breakdown, degenerate inputs discovered mid-computation).
/// The CLI maps it to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model variants.  HP ties the distant-past kernel to the recent-past one
/// (full memory), VM zeroes it (memory resets at each own event), GVM keeps
/// both kernels free.
enum class ModelVariant { HP, VM, GVM };

/// Per-entry estimation constraint for the (alpha, alpha_tilde) pair (i, j):
///  - Free:      both entries estimated freely,
///  - Zero:      alpha = alpha_tilde = 0 (no interaction j -> i),
///  - Equal:     alpha_tilde = alpha, one shared variable (full memory),
///  - TildeZero: alpha_tilde = 0, alpha free (memory resets, VM-style).
enum class MaskTag { Free, Zero, Equal, TildeZero };

using MaskMatrix = Eigen::Matrix<MaskTag, Eigen::Dynamic, Eigen::Dynamic>;

[[nodiscard]] std::string to_string(ModelVariant v);
[[nodiscard]] std::string to_string(MaskTag t);
[[nodiscard]] ModelVariant variant_from_string(const std::string& s);
[[nodiscard]] MaskTag mask_tag_from_string(const std::string& s);

/// Parameters of a d-dimensional exponential-kernel model.  Row i of alpha /
/// alpha_tilde collects the jump sizes felt by dimension i; decay rates
/// depend on the receiving dimension only.  The recent-past kernel is
/// alpha(i,j) * exp(-beta(i) * t) and the distant-past kernel is
/// alpha_tilde(i,j) * exp(-beta_tilde(i) * t).
struct KernelParameters {
  Eigen::VectorXd mu;           ///< baseline rates, size d, > 0
  Eigen::MatrixXd alpha;        ///< recent-past jump sizes, d x d, any sign
  Eigen::VectorXd beta;         ///< recent-past decay rates, size d, > 0
  Eigen::MatrixXd alpha_tilde;  ///< distant-past jump sizes, d x d
  Eigen::VectorXd beta_tilde;   ///< distant-past decay rates, size d, > 0
  MaskMatrix mask;              ///< per-entry estimation constraints

  [[nodiscard]] Eigen::Index dimension() const { return mu.size(); }

  /// All-zero interactions, unit decays, baseline 1, mask all Free.
  [[nodiscard]] static KernelParameters zeros(Eigen::Index d);

  /// True when beta_tilde equals beta exactly (elementwise); the closed-form
  /// compensator and the likelihood require this.
  [[nodiscard]] bool common_decay() const;

  /// Copy with the HP constraint applied (alpha_tilde := alpha,
  /// beta_tilde := beta).
  [[nodiscard]] KernelParameters as_hp() const;
  /// Copy with the VM constraint applied (alpha_tilde := 0,
  /// beta_tilde := beta).
  [[nodiscard]] KernelParameters as_vm() const;
};

/// One realization of the process: event times ascending in (0, horizon],
/// dims[k] in [0, d) identifying the component that jumped.  Dimensions are
/// 0-indexed in memory; file formats use 1-based labels.
struct Realization {
  double horizon{0.0};
  Eigen::Index dimension{0};
  std::vector<double> times;
  std::vector<int> dims;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// Event times of one dimension only.
[[nodiscard]] std::vector<double> per_dimension_times(const Realization& r, int dim);

/// Number of events of each dimension.
[[nodiscard]] Eigen::VectorXi per_dimension_counts(const Realization& r);

/// Structural checks on a parameter set; returns human-readable violations
/// (empty when valid).  `variant` additionally enforces the variant's
/// constraints (HP: alpha_tilde == alpha and beta_tilde == beta; VM:
/// alpha_tilde == 0).
[[nodiscard]] std::vector<std::string> validate(const KernelParameters& p,
                                                ModelVariant variant = ModelVariant::GVM);

/// Structural checks on a realization: sizes match, times strictly
/// increasing within (0, horizon], dims in range.
[[nodiscard]] std::vector<std::string> validate(const Realization& r);

/// Throws ValidationError listing all violations when any are present.
void require_valid(const KernelParameters& p, ModelVariant variant = ModelVariant::GVM);
void require_valid(const Realization& r);

}  // namespace hawkes
