#pragma once

#include <span>

#include "waveinfer/model.hpp"

namespace waveinfer {

/// Real 2x2 matrix acting on one mode's (u, v) coefficients.
struct ModeMatrix2x2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;

  static constexpr ModeMatrix2x2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr ModeMatrix2x2 zero() { return {}; }

  constexpr ModePair apply(ModePair x) const {
    return {m11 * x.u + m12 * x.v, m21 * x.u + m22 * x.v};
  }
  constexpr ModeMatrix2x2 transposed() const { return {m11, m21, m12, m22}; }
  double max_abs() const;
  bool finite() const;

  friend constexpr ModeMatrix2x2 operator*(const ModeMatrix2x2& x, const ModeMatrix2x2& y) {
    return {x.m11 * y.m11 + x.m12 * y.m21, x.m11 * y.m12 + x.m12 * y.m22,
            x.m21 * y.m11 + x.m22 * y.m21, x.m21 * y.m12 + x.m22 * y.m22};
  }
  friend constexpr ModeMatrix2x2 operator+(const ModeMatrix2x2& x, const ModeMatrix2x2& y) {
    return {x.m11 + y.m11, x.m12 + y.m12, x.m21 + y.m21, x.m22 + y.m22};
  }
  friend constexpr ModeMatrix2x2 operator-(const ModeMatrix2x2& x, const ModeMatrix2x2& y) {
    return {x.m11 - y.m11, x.m12 - y.m12, x.m21 - y.m21, x.m22 - y.m22};
  }
  friend constexpr ModeMatrix2x2 operator*(double s, const ModeMatrix2x2& x) {
    return {s * x.m11, s * x.m12, s * x.m21, s * x.m22};
  }
  friend bool operator==(const ModeMatrix2x2&, const ModeMatrix2x2&) = default;
};

/// Largest entrywise absolute difference.
double max_abs_diff(const ModeMatrix2x2& x, const ModeMatrix2x2& y);

/// Regime of a mode: Critical iff |b kappa - a^2| <= tol * a^2.
Regime classify_mode(double a, double b, double kappa, double tol = 1e-12);

/// Per-mode generator [[0, 1], [-b kappa, -2a]].
ModeMatrix2x2 mode_generator(double a, double b, double kappa);

/// Closed-form exp(t * mode_generator(a, b, kappa)).
///
/// Every regime is evaluated through one formula
///
///   e^{-at} [[c + a s, s], [-b kappa s, c - a s]]
///
/// where c and s are cos(wt) and sin(wt)/w for w = sqrt(b kappa - a^2)
/// (oscillatory), cosh(gt) and sinh(gt)/g for g = sqrt(a^2 - b kappa)
/// (overdamped), and 1 and t at the critical point. Both are entire
/// functions of zeta = (b kappa - a^2) t^2; for |zeta| <= 1 they are summed
/// as power series, so modes near the regime boundary lose no accuracy.
///
/// Throws DomainError for t < 0 or non-finite input.
ModeMatrix2x2 mode_propagator(double a, double b, double kappa, double t);

/// Scaling-and-squaring Taylor evaluation of exp(t M). Independent of the
/// closed forms; used as a verification oracle.
/// Throws DomainError for t < 0, NumericError when the result overflows.
ModeMatrix2x2 expm_oracle(const ModeMatrix2x2& m, double t);

/// Operators R, R1, R2 restricted to one mode (A^{-1} e_n = -e_n / kappa_n).
struct RMatrices {
  ModeMatrix2x2 r;
  ModeMatrix2x2 r1;
  ModeMatrix2x2 r2;
};

RMatrices r_matrices(double a, double b, double kappa);

/// Per-mode energy inner product kappa u_x u_y + v_x v_y.
constexpr double v_inner(ModePair x, ModePair y, double kappa) {
  return kappa * x.u * y.u + x.v * y.v;
}

/// Sum over modes of kappa_n u_xn u_yn + v_xn v_yn. Throws ShapeError on length mismatch.
double v_inner(std::span<const ModePair> x, std::span<const ModePair> y,
               std::span<const double> kappa);

double v_inner(std::span<const ModePair> x, std::span<const ModePair> y, const Model& model);

}  // namespace waveinfer
