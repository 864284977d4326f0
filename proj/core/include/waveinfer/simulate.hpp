#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "waveinfer/model.hpp"
#include "waveinfer/semigroup.hpp"

namespace waveinfer {

enum class Scheme { Euler, Exact };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

/// Square root F of the noise covariance, F F^T = Q.
class NoiseFactor {
 public:
  NoiseFactor(Eigen::MatrixXd factor, bool diagonal);

  bool diagonal() const noexcept { return diagonal_; }
  /// Per-mode amplitudes sqrt(lambda_n); only meaningful in the diagonal case.
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  const Eigen::MatrixXd& matrix() const noexcept { return factor_; }
  Eigen::MatrixXd covariance() const { return factor_ * factor_.transpose(); }

  /// out = F * xi.
  void apply(std::span<const double> xi, std::span<double> out) const;

 private:
  Eigen::MatrixXd factor_;
  std::vector<double> amplitudes_;
  bool diagonal_;
};

/// Diagonal fast path sqrt(lambda_n); otherwise the symmetric PSD square root
/// from an eigendecomposition. Throws NumericError if Q is indefinite.
NoiseFactor noise_factor(const Model& model);

/// Accumulated stochastic integrals int <R X, Phi dB>_V (and R1, R2), formed
/// with left-endpoint states and the same Gaussian increments as the path.
struct ItoIntegrals {
  double r = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

struct PathStatistics {
  double I_T = 0.0;  ///< time average of the energy norm squared
  double Y_T = 0.0;  ///< time average of sum kappa_n u_n^2
  double H_T = 0.0;  ///< time average of sum v_n^2
  double T = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  Scheme scheme = Scheme::Euler;
  std::uint64_t seed = 0;
  ModeState final_state;
  std::optional<ItoIntegrals> ito;
};

/// Running statistics at a grid time; at t = 0 they hold the instantaneous values at x0.
struct TrajectorySample {
  double time = 0.0;
  double I_t = 0.0;
  double Y_t = 0.0;
  double H_t = 0.0;
};

struct RecordOptions {
  bool ito = false;            ///< accumulate ItoIntegrals (Euler scheme only)
  std::size_t decimation = 0;  ///< record every k-th step; 0 disables the trajectory
};

struct PathResult {
  PathStatistics stats;
  std::vector<TrajectorySample> trajectory;
};

/// Integrates the truncated 2N-dimensional system on [0, T] and accumulates
/// left-endpoint Riemann sums of the ergodic functionals.
///
/// Euler:  u <- u + v dt;  v <- v + (-b kappa u - 2 a v) dt + (F xi) sqrt(dt)
/// Exact:  (u, v) <- P(dt) (u, v) + L(dt) (xi1, xi2) per mode, L L^T = C(dt)
///
/// Identical (model, scheme, dt, T, seed) produce bit-identical results.
/// Throws DomainError for invalid dt/T, UnsupportedError for the exact scheme
/// with correlated noise or with ito recording, NumericError on blow-up.
PathResult simulate_path(const Model& model, Scheme scheme, double dt, double T, std::uint64_t seed,
                         const RecordOptions& record = {});

/// Finite-horizon noise covariance C(dt) = int_0^dt S(s) Phi Phi^* S^*(s) ds of one
/// mode in (u, v) coordinates, by composite Gauss-Legendre quadrature.
ModeMatrix2x2 transition_covariance(double a, double b, double kappa, double lambda, double dt);

struct ExactTransition {
  ModeMatrix2x2 propagator;
  ModeMatrix2x2 noise_cov;
  ModeMatrix2x2 noise_chol;  ///< lower triangular, noise_chol * noise_chol^T = noise_cov
};

/// Throws UnsupportedError when Q is not diagonal.
ExactTransition exact_transition(const Model& model, std::size_t mode, double dt);

enum class ItoIdentity { R, R1, R2 };

std::string_view to_string(ItoIdentity which);

/// Signed difference LHS - RHS of the Ito representation of I_T (R), H_T (R1)
/// or Y_T (R2). Throws UsageError when stats carry no Ito record.
double ito_identity_defect(const PathStatistics& stats, const Model& model, ItoIdentity which);

/// |ito_identity_defect|.
double ito_identity_residual(const PathStatistics& stats, const Model& model, ItoIdentity which);

}  // namespace waveinfer
