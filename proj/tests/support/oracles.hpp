#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <waveinfer/covariance.hpp>
#include <waveinfer/model.hpp>
#include <waveinfer/semigroup.hpp>

namespace waveinfer::oracle {

/// System matrix in coordinates (u_1..u_N, v_1..v_N).
Eigen::MatrixXd system_matrix(const Model& model);

/// Stationary covariance Sigma solving A Sigma + Sigma A^T + G = 0 (G = Q in the
/// velocity block) by a dense Kronecker solve.
Eigen::MatrixXd lyapunov_covariance(const Model& model);

/// Q_inf in coordinates: Sigma * diag(kappa, 1).
Eigen::MatrixXd q_infinity_lyapunov(const Model& model);

/// sum_{n,k} q_nk Cov(l_n . X, l_k . X) under Sigma, with the per-mode linear
/// functional l = (2a/(b+1), 1), (0, 1) or (2a, 0) for Rtilde, Rtilde1, Rtilde2.
double clt_trace_lyapunov(const Model& model, CltOperator op);

/// exp(tM) by Eigen's matrix exponential.
ModeMatrix2x2 expm_eigen(const ModeMatrix2x2& m, double t);

/// Sum over the 2N V-orthonormal basis vectors of <Q_inf e, e>_V.
double brute_force_trace(const Model& model);

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n);
Eigen::MatrixXd random_rotation(std::mt19937_64& rng, int n);

struct ModelDraw {
  int modes_min = 1;
  int modes_max = 4;
  bool diagonal = false;
};
Model random_model(std::mt19937_64& rng, const ModelDraw& draw = {});
ModeState random_state(std::mt19937_64& rng, std::size_t n);

double uniform(std::mt19937_64& rng, double lo, double hi);
double log_uniform(std::mt19937_64& rng, double lo, double hi);

/// Reference setup: wave preset, a = 1, b = 0.2, N = 10, lambda_n = 1000 / n^2.
Model reference_model();

}  // namespace waveinfer::oracle
