#pragma once

#include <span>
#include <string_view>

#include <Eigen/Core>

#include "waveinfer/model.hpp"

namespace waveinfer {

/// Applies the invariant covariance operator Q_inf (as an operator on the
/// energy space) to mode coefficients x. Works for any symmetric Q; the
/// block double sum collapses to diag(Q/(4ab), Q/(4a)) when Q is diagonal.
/// Throws ShapeError if x.size() != model.modes().
ModeState q_infinity_apply(const Model& model, std::span<const ModePair> x);

/// Dense 2N x 2N matrix of q_infinity_apply in coordinates (u_1..u_N, v_1..v_N).
Eigen::MatrixXd densify_q_infinity(const Model& model);

struct QuadratureResult {
  ModeState value;
  double tail_bound = 0.0;  ///< exp(-2 rho t_max), rho = slowest mode decay rate
  bool accurate = true;     ///< false when tail_bound >= 1e-10
  int nodes = 0;
};

/// Composite Simpson evaluation of int_0^t_max S(t) Phi Phi^* S^*(t) x dt using
/// mode_propagator and its energy-space adjoint. `steps` is rounded up to even.
QuadratureResult q_infinity_quadrature_oracle(const Model& model, std::span<const ModePair> x,
                                              double t_max, int steps);

/// Slowest per-mode decay rate: a for oscillatory/critical modes, a - sqrt(a^2 - b kappa) otherwise.
double slowest_decay_rate(const Model& model);

/// Largest oscillation frequency sqrt(b kappa - a^2) over oscillatory modes (0 if none).
double max_frequency(const Model& model);

struct TraceSplit {
  double total = 0.0;     ///< (b+1)/(4ab) Tr Q
  double position = 0.0;  ///< Tr Q / (4ab), limit of Y_T
  double velocity = 0.0;  ///< Tr Q / (4a), limit of H_T
};

TraceSplit trace_q_infinity(const Model& model);

enum class CltOperator { Rtilde, Rtilde1, Rtilde2 };

std::string_view to_string(CltOperator op);

/// Tr(Q R~ Q_inf R~^*) as the double sum over (n, k) of numerator/D(n,k) * q_nk^2.
double clt_trace(const Model& model, CltOperator op);

struct AsymptoticVariances {
  double a_hat = 0.0;
  double b_hat = 0.0;
  double a_tilde = 0.0;
  double b_tilde = 0.0;
  /// The closed forms are only backed by experiments for diagonal Q.
  bool diagonal_case = true;
};

/// Limiting variances of sqrt(T)(estimate - truth) from the general double sums.
/// Throws DomainError when Tr Q == 0.
AsymptoticVariances asymptotic_variances(const Model& model);

/// Same quantities from the diagonal-case closed forms (Tr Q^2, Tr(Q^2 (-A)^{-1})).
/// Throws UnsupportedError when Q is not diagonal.
AsymptoticVariances asymptotic_variances_diagonal(const Model& model);

/// Deterministic pairwise summation; the reduction tree depends only on the index order.
double pairwise_sum(std::span<const double> values);

}  // namespace waveinfer
