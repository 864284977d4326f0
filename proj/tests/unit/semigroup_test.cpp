#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <waveinfer/errors.hpp>
#include <waveinfer/semigroup.hpp>

#include "oracles.hpp"

using namespace waveinfer;
using std::numbers::pi;

namespace {

void expect_matrix_near(const ModeMatrix2x2& x, const ModeMatrix2x2& y, double tol) {
  EXPECT_NEAR(x.m11, y.m11, tol);
  EXPECT_NEAR(x.m12, y.m12, tol);
  EXPECT_NEAR(x.m21, y.m21, tol);
  EXPECT_NEAR(x.m22, y.m22, tol);
}

double rel_diff(const ModeMatrix2x2& x, const ModeMatrix2x2& y) {
  return max_abs_diff(x, y) / std::max(1.0, y.max_abs());
}

/// (a, b, kappa) in the requested regime; class 2 lands within 1e-9 of critical.
std::array<double, 3> draw_params(std::mt19937_64& rng, int cls) {
  const double a = oracle::log_uniform(rng, 0.05, 5.0);
  const double b = oracle::log_uniform(rng, 0.05, 5.0);
  double delta = 0.0;
  if (cls == 0) delta = a * a * oracle::log_uniform(rng, 1e-6, 1e3);
  if (cls == 1) delta = -a * a * oracle::uniform(rng, 1e-6, 0.999);
  if (cls == 2) delta = oracle::uniform(rng, -1e-9, 1e-9);
  return {a, b, (a * a + delta) / b};
}

}  // namespace

TEST(ClassifyMode, Examples) {
  EXPECT_EQ(classify_mode(1.0, 0.2, pi * pi), Regime::Oscillatory);
  EXPECT_EQ(classify_mode(2.0, 1.0, 1.0), Regime::Overdamped);
  EXPECT_EQ(classify_mode(1.0, 1.0, 1.0), Regime::Critical);
  EXPECT_EQ(classify_mode(1.0, 1.0, 1.0 + 1e-6), Regime::Oscillatory);
  EXPECT_EQ(classify_mode(1.0, 1.0, 1.0 + 1e-6, 1e-5), Regime::Critical);
}

TEST(ModeGenerator, Examples) {
  expect_matrix_near(mode_generator(1, 1, 1), {0, 1, -1, -2}, 0.0);
  expect_matrix_near(mode_generator(1, 0.2, pi * pi), {0, 1, -1.97392, -2}, 1e-5);
  expect_matrix_near(mode_generator(0.5, 2, 4), {0, 1, -8, -1}, 0.0);
}

TEST(ModePropagator, CriticalClosedForm) {
  const double e = std::exp(-1.0);
  expect_matrix_near(mode_propagator(1, 1, 1, 1), {2 * e, e, -e, 0.0}, 1e-15);
  expect_matrix_near(mode_propagator(1, 1, 1, 1), {0.73576, 0.36788, -0.36788, 0.0}, 1e-5);
}

TEST(ModePropagator, IdentityAtZero) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const auto [a, b, k] = draw_params(rng, i % 3);
    expect_matrix_near(mode_propagator(a, b, k, 0.0), ModeMatrix2x2::identity(), 0.0);
  }
}

TEST(ModePropagator, ReferenceModeMatchesOracle) {
  const auto p = mode_propagator(1, 0.2, pi * pi, 1.0);
  EXPECT_LE(max_abs_diff(p, expm_oracle(mode_generator(1, 0.2, pi * pi), 1.0)), 1e-10);
  EXPECT_LE(max_abs_diff(p, oracle::expm_eigen(mode_generator(1, 0.2, pi * pi), 1.0)), 1e-10);
}

TEST(ModePropagator, NegativeTimeRejected) { EXPECT_THROW(mode_propagator(1, 1, 1, -0.1), DomainError); }

TEST(ModePropagator, MatchesEigenExpmAllRegimes) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 600; ++i) {
    const auto [a, b, k] = draw_params(rng, i % 3);
    const double t = oracle::uniform(rng, 0.0, 5.0);
    const auto m = mode_generator(a, b, k);
    EXPECT_LE(rel_diff(mode_propagator(a, b, k, t), oracle::expm_eigen(m, t)), 1e-10)
        << "a=" << a << " b=" << b << " kappa=" << k << " t=" << t;
  }
}

TEST(ModePropagator, ContinuousAcrossCriticalBoundary) {
  for (double delta : {-1e-6, -1e-9, -1e-12, 0.0, 1e-12, 1e-9, 1e-6}) {
    const double k = 1.0 + delta;
    const auto p = mode_propagator(1.0, 1.0, k, 2.0);
    const auto ref = oracle::expm_eigen(mode_generator(1.0, 1.0, k), 2.0);
    EXPECT_LE(rel_diff(p, ref), 1e-12) << delta;
  }
}

TEST(ModePropagator, SemigroupLaw) {
  std::mt19937_64 rng(5);
  const double times[] = {0.01, 0.1, 0.5, 1.0, 3.0, 10.0};
  for (int cls = 0; cls < 3; ++cls) {
    for (int i = 0; i < 5; ++i) {
      const auto [a, b, k] = draw_params(rng, cls);
      for (double t : times)
        for (double s : times) {
          const auto lhs = mode_propagator(a, b, k, t + s);
          const auto rhs = mode_propagator(a, b, k, t) * mode_propagator(a, b, k, s);
          EXPECT_LE(rel_diff(lhs, rhs), 1e-10);
        }
    }
  }
}

TEST(ModePropagator, GeneratorFirstOrderConvergence) {
  const double a = 1.0, b = 0.2, k = pi * pi;
  const auto gen = mode_generator(a, b, k);
  double prev = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double h = 1e-3 / std::pow(2.0, i);
    const auto p = mode_propagator(a, b, k, h);
    const auto diff = (1.0 / h) * (p - ModeMatrix2x2::identity());
    const double err = max_abs_diff(diff, gen);
    if (i > 0) EXPECT_NEAR(prev / err, 2.0, 0.05);
    prev = err;
  }
}

TEST(ModePropagator, ExponentialStability) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 60; ++i) {
    const double a = oracle::uniform(rng, 0.5, 3.0);
    const double b = oracle::uniform(rng, 0.5, 3.0);
    const int cls = i % 3;
    const double delta = cls == 0 ? a * a : (cls == 1 ? -0.5 * a * a : 0.0);
    const double k = (a * a + delta) / b;
    const double rho = a - std::sqrt(std::max(0.0, a * a - b * k));
    EXPECT_LT(mode_propagator(a, b, k, 40.0 / rho).max_abs(), 1e-6) << a << " " << b << " " << k;
  }
}

TEST(ExpmOracle, Examples) {
  expect_matrix_near(expm_oracle(ModeMatrix2x2::zero(), 5.0), ModeMatrix2x2::identity(), 0.0);
  expect_matrix_near(expm_oracle({0, 1, -1, -2}, 1.0), mode_propagator(1, 1, 1, 1), 1e-14);
  const ModeMatrix2x2 m{0.3, -1.2, 0.7, -0.4};
  expect_matrix_near(expm_oracle(m, 2.0), expm_oracle(m, 1.0) * expm_oracle(m, 1.0), 1e-13);
}

TEST(ExpmOracle, MatchesEigenUpToNorm50) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const ModeMatrix2x2 m{oracle::uniform(rng, -5, 5), oracle::uniform(rng, -5, 5), oracle::uniform(rng, -5, 5),
                          oracle::uniform(rng, -5, 5)};
    const double t = oracle::uniform(rng, 0.0, 5.0);
    const auto ref = oracle::expm_eigen(m, t);
    EXPECT_LE(max_abs_diff(expm_oracle(m, t), ref) / std::max(1.0, ref.max_abs()), 1e-12);
  }
}

TEST(ExpmOracle, Overflow) { EXPECT_THROW(expm_oracle({1e3, 0, 0, 1e3}, 10.0), NumericError); }

TEST(RMatrices, Examples) {
  expect_matrix_near(r_matrices(3, 0.5, 9).r1, {0.5, 0, 0, 1}, 0.0);
  expect_matrix_near(r_matrices(1, 1, 2).r, {2, 0.5, 1, 1}, 1e-15);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const double a = oracle::uniform(rng, 0.1, 3), b = oracle::uniform(rng, 0.1, 3), k = oracle::uniform(rng, 0.1, 50);
    const auto r = r_matrices(a, b, k);
    expect_matrix_near(r.r2 - r.r1, {4 * a * a / k, 2 * a / k, 2 * a, 0.0}, 1e-12);
  }
}

TEST(RMatrices, LyapunovIdentities) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const double a = oracle::log_uniform(rng, 0.05, 5), b = oracle::log_uniform(rng, 0.05, 5);
    const double k = oracle::log_uniform(rng, 0.1, 1e4);
    const ModePair x{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
    const auto m = mode_generator(a, b, k);
    const auto r = r_matrices(a, b, k);
    const ModePair mx = m.apply(x);
    const auto check = [&](const ModeMatrix2x2& rm, double expected) {
      const ModePair rx = rm.apply(x);
      const double scale = std::sqrt(v_inner(rx, rx, k) * v_inner(mx, mx, k));
      EXPECT_LE(std::abs(v_inner(rx, mx, k) - expected), 1e-10 * scale);
    };
    check(r.r, -2 * a * b / (b + 1) * v_inner(x, x, k));
    check(r.r1, -2 * a * x.v * x.v);
    check(r.r2, -2 * a * b * k * x.u * x.u);
  }
}

TEST(RMatrices, SelfAdjointInEnergySpace) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 100; ++i) {
    const double a = oracle::uniform(rng, 0.1, 3), b = oracle::uniform(rng, 0.1, 3), k = oracle::uniform(rng, 0.1, 100);
    const ModePair x{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
    const ModePair y{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
    const auto r = r_matrices(a, b, k);
    for (const auto& m : {r.r, r.r1, r.r2}) {
      const double lhs = v_inner(m.apply(x), y, k), rhs = v_inner(x, m.apply(y), k);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(VInner, Examples) {
  EXPECT_EQ(v_inner(ModePair{1, 0}, ModePair{1, 0}, 4.0), 4.0);
  EXPECT_EQ(v_inner(ModePair{0, 3}, ModePair{0, 2}, 17.0), 6.0);
  const ModeState x{{1, 2}, {3, 4}}, y{{5, 6}, {7, 8}};
  const std::vector<double> kappa{2.0, 3.0};
  EXPECT_DOUBLE_EQ(v_inner(x, y, kappa), v_inner(x[0], y[0], 2.0) + v_inner(x[1], y[1], 3.0));
  EXPECT_THROW(v_inner(x, ModeState{{1, 1}}, kappa), ShapeError);
}
