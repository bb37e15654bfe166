#pragma once

#include <Eigen/Dense>

#include "hawkes/types.hpp"

namespace hawkes {

/// L1 norm of the pointwise larger of the two kernels on (0, inf):
///
///   integral_0^inf | max(a exp(-b t), at exp(-bt t)) | dt.
///
/// The two exponentials cross at most once, so the integral is evaluated in
/// closed form, piecewise around the crossover when both jump sizes share a
/// sign.  A positive kernel always dominates a non-positive one; the max of
/// two negative kernels is the one of smaller magnitude.
[[nodiscard]] double l1_max_kernel(double a, double b, double at, double bt);

enum class ExistenceTheorem {
  Spectral,   ///< spectral-radius condition on the L1 max-kernel matrix
  VmBounded,  ///< memory-reset models with bounded kernels always admit
              ///< a stationary version; the condition holds vacuously
};

struct ExistenceReport {
  Eigen::MatrixXd condition_matrix;  ///< entry (i,j) = l1_max_kernel of pair (i,j)
  double spectral_radius{0.0};
  bool satisfied{false};
  ExistenceTheorem theorem{ExistenceTheorem::Spectral};
};

/// Spectral radius (largest eigenvalue modulus) of a square matrix.
[[nodiscard]] double spectral_radius(const Eigen::MatrixXd& m);

/// Builds the condition matrix from the parameters' kernel pairs and checks
/// the stationarity condition: spectral radius < 1 for GVM and HP; for VM
/// the condition is always satisfied (bounded kernels), the matrix and
/// radius are still reported for information.
[[nodiscard]] ExistenceReport check_existence(const KernelParameters& p, ModelVariant variant);

}  // namespace hawkes
