#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace waveinfer {

/// Coefficients of one mode: position u (in the stiffness-weighted space) and velocity v.
struct ModePair {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const ModePair&, const ModePair&) = default;
};

using ModeState = std::vector<ModePair>;

/// Spectral regime of a single mode, decided by the sign of b*kappa - a^2.
enum class Regime { Oscillatory, Overdamped, Critical };

std::string_view to_string(Regime regime);

enum class PresetKind { Wave, Plate };

std::string_view to_string(PresetKind kind);
PresetKind parse_preset_kind(std::string_view text);

/// Noise spectrum rule lambda_n = scale / n^exponent.
struct LambdaRule {
  double scale = 1000.0;
  double exponent = 2.0;

  double operator()(std::size_t n) const;
};

// Full problem description for the truncated damped second-order system
//
//   du_n = v_n dt
//   dv_n = (-b kappa_n u_n - 2 a v_n) dt + (Phi_1 dB)_n
//
// in the eigenbasis of the stiffness operator. The noise covariance Q is
// stored as an N x N matrix of entries <Q e_n, e_k>. Immutable after
// construction; the constructor enforces every invariant.
class Model {
 public:
  Model(double a, double b, std::vector<double> kappa, Eigen::MatrixXd q_matrix,
        ModeState x0);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t modes() const noexcept { return kappa_.size(); }
  std::span<const double> kappa() const noexcept { return kappa_; }
  double kappa(std::size_t n) const { return kappa_.at(n); }
  const Eigen::MatrixXd& q_matrix() const noexcept { return q_; }
  /// Diagonal entry <Q e_n, e_n>; equals lambda_n in the diagonal case.
  double lambda(std::size_t n) const { return q_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)); }
  bool q_is_diagonal() const noexcept { return diagonal_; }
  const ModeState& x0() const noexcept { return x0_; }

  Regime regime(std::size_t n, double tol = 1e-12) const;

  /// Copy with different true parameters (same spectrum, noise and x0).
  Model with_parameters(double a, double b) const;
  /// Copy with a different noise covariance.
  Model with_q_matrix(Eigen::MatrixXd q_matrix) const;
  /// Copy with a different initial condition.
  Model with_x0(ModeState x0) const;

 private:
  double a_;
  double b_;
  std::vector<double> kappa_;
  Eigen::MatrixXd q_;
  ModeState x0_;
  bool diagonal_ = true;
};

/// Built-in presets: Dirichlet wave (kappa_n = n^2 pi^2) or plate
/// (kappa_n = n^4 pi^4) on (0, 1), diagonal noise from `rule`, and
/// u_n = v_n = 1 initial coefficients.
Model builtin_preset(PresetKind kind, int modes, double a, double b,
                     const LambdaRule& rule = {});

/// Truncated trace of Q over the retained modes.
double trace_q(const Model& model);

}  // namespace waveinfer
