#include "waveinfer/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "waveinfer/errors.hpp"

namespace waveinfer {

double ModeMatrix2x2::max_abs() const {
  return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
}

bool ModeMatrix2x2::finite() const {
  return std::isfinite(m11) && std::isfinite(m12) && std::isfinite(m21) && std::isfinite(m22);
}

double max_abs_diff(const ModeMatrix2x2& x, const ModeMatrix2x2& y) { return (x - y).max_abs(); }

Regime classify_mode(double a, double b, double kappa, double tol) {
  const double a2 = a * a;
  const double d = b * kappa - a2;
  if (std::abs(d) <= tol * a2) return Regime::Critical;
  return d > 0.0 ? Regime::Oscillatory : Regime::Overdamped;
}

ModeMatrix2x2 mode_generator(double a, double b, double kappa) {
  return {0.0, 1.0, -b * kappa, -2.0 * a};
}

namespace {

// cos(sqrt(z)) and sin(sqrt(z))/sqrt(z) continued analytically to z <= 0.
struct CosSinc {
  double c;
  double s;
};

CosSinc cos_sinc_series(double zeta) {
  double c = 1.0;
  double s = 1.0;
  double tc = 1.0;
  double ts = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double dk = static_cast<double>(k);
    tc *= -zeta / ((2.0 * dk - 1.0) * (2.0 * dk));
    ts *= -zeta / ((2.0 * dk) * (2.0 * dk + 1.0));
    c += tc;
    s += ts;
    if (std::abs(tc) <= 1e-18 * std::abs(c) && std::abs(ts) <= 1e-18 * std::abs(s)) break;
  }
  return {c, s};
}

}  // namespace

ModeMatrix2x2 mode_propagator(double a, double b, double kappa, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError(fmt::format("propagator time must be finite and >= 0, got {}", t));
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(kappa))
    throw DomainError("propagator parameters must be finite");
  const double bk = b * kappa;
  const double d = bk - a * a;
  const double zeta = d * t * t;

  if (std::abs(zeta) <= 1.0) {
    const auto [c, sinc] = cos_sinc_series(zeta);
    const double decay = std::exp(-a * t);
    const double ec = decay * c;
    const double es = decay * t * sinc;
    return {ec + a * es, es, -bk * es, ec - a * es};
  }

  if (d > 0.0) {
    const double w = std::sqrt(d);
    const double decay = std::exp(-a * t);
    const double ec = decay * std::cos(w * t);
    const double es = decay * std::sin(w * t) / w;
    return {ec + a * es, es, -bk * es, ec - a * es};
  }

  // Overdamped: eigenvalues l1 = -a + g, l2 = -a - g with g = sqrt(a^2 - b kappa).
  // l1 is formed as -b kappa / (a + g) to avoid cancellation when b kappa << a^2.
  const double g = std::sqrt(-d);
  const double l1 = -bk / (a + g);
  const double l2 = -a - g;
  const double e1 = std::exp(l1 * t);
  const double e2 = std::exp(l2 * t);
  const double inv = 1.0 / (2.0 * g);
  const double diff = (e1 - e2) * inv;
  return {(e1 * (a + g) - e2 * (-l1)) * inv, diff, -bk * diff, (e1 * l1 + e2 * (a + g)) * inv};
}

ModeMatrix2x2 expm_oracle(const ModeMatrix2x2& m, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError(fmt::format("expm time must be finite and >= 0, got {}", t));
  const ModeMatrix2x2 x = t * m;
  if (!x.finite()) throw NumericError("expm argument is not finite");
  const double norm = std::max(std::abs(x.m11) + std::abs(x.m21), std::abs(x.m12) + std::abs(x.m22));
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  if (squarings > 1000) throw NumericError("expm argument too large");
  const ModeMatrix2x2 scaled = std::ldexp(1.0, -squarings) * x;

  ModeMatrix2x2 sum = ModeMatrix2x2::identity();
  ModeMatrix2x2 term = ModeMatrix2x2::identity();
  for (int k = 1; k <= 30; ++k) {
    term = (1.0 / k) * (term * scaled);
    sum = sum + term;
    if (term.max_abs() <= 1e-20 * sum.max_abs()) break;
  }
  for (int i = 0; i < squarings; ++i) {
    sum = sum * sum;
    if (!sum.finite()) throw NumericError("expm overflow during squaring");
  }
  return sum;
}

RMatrices r_matrices(double a, double b, double kappa) {
  const double bp1 = b + 1.0;
  RMatrices out;
  out.r = {b + 4.0 * a * a / (bp1 * kappa), 2.0 * a / (bp1 * kappa), 2.0 * a / bp1, 1.0};
  out.r1 = {b, 0.0, 0.0, 1.0};
  out.r2 = {b + 4.0 * a * a / kappa, 2.0 * a / kappa, 2.0 * a, 1.0};
  return out;
}

double v_inner(std::span<const ModePair> x, std::span<const ModePair> y,
               std::span<const double> kappa) {
  if (x.size() != y.size() || x.size() != kappa.size())
    throw ShapeError(fmt::format("v_inner length mismatch: {} vs {} (kappa {})", x.size(), y.size(),
                                 kappa.size()));
  double sum = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) sum += v_inner(x[n], y[n], kappa[n]);
  return sum;
}

double v_inner(std::span<const ModePair> x, std::span<const ModePair> y, const Model& model) {
  return v_inner(x, y, model.kappa());
}

}  // namespace waveinfer
