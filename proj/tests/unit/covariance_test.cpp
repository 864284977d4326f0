#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include <waveinfer/covariance.hpp>
#include <waveinfer/errors.hpp>

#include "oracles.hpp"

using namespace waveinfer;

namespace {

double rel_state_err(const ModeState& x, const ModeState& ref, const Model& m) {
  ModeState d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = {x[i].u - ref[i].u, x[i].v - ref[i].v};
  return std::sqrt(v_inner(d, d, m) / v_inner(ref, ref, m));
}

QuadratureResult quadrature(const Model& m, const ModeState& x) {
  const double t_max = 12.0 / slowest_decay_rate(m);
  const double rate = std::max({max_frequency(m), m.a(), 1.0});
  return q_infinity_quadrature_oracle(m, x, t_max, static_cast<int>(std::ceil(40.0 * t_max * rate)));
}

Model two_mode_nondiagonal() {
  Eigen::MatrixXd q(2, 2);
  q << 2.0, 0.7, 0.7, 1.0;
  return Model(1.0, 1.0, {1.0, 4.0}, q, {{1, 1}, {1, 1}});
}

}  // namespace

TEST(QInfinityApply, DiagonalBlockForm) {
  const Model m = oracle::reference_model();
  std::mt19937_64 rng(1);
  const ModeState x = oracle::random_state(rng, m.modes());
  const ModeState y = q_infinity_apply(m, x);
  for (std::size_t n = 0; n < m.modes(); ++n) {
    EXPECT_NEAR(y[n].u, m.lambda(n) / (4 * m.a() * m.b()) * x[n].u, 1e-12 * m.lambda(n));
    EXPECT_NEAR(y[n].v, m.lambda(n) / (4 * m.a()) * x[n].v, 1e-12 * m.lambda(n));
  }
}

TEST(QInfinityApply, ZeroNoise) {
  const Model m(1.0, 0.5, {1.0, 3.0}, Eigen::MatrixXd::Zero(2, 2), {{1, 1}, {1, 1}});
  for (const auto& p : q_infinity_apply(m, ModeState{{1, 2}, {3, 4}})) {
    EXPECT_EQ(p.u, 0.0);
    EXPECT_EQ(p.v, 0.0);
  }
}

TEST(QInfinityApply, ShapeMismatch) {
  EXPECT_THROW(q_infinity_apply(oracle::reference_model(), ModeState{{1, 1}}), ShapeError);
}

TEST(QInfinityApply, NonDiagonalMatchesQuadrature) {
  const Model m = two_mode_nondiagonal();
  const ModeState x{{0.3, -1.0}, {0.8, 0.5}};
  const auto quad = quadrature(m, x);
  EXPECT_TRUE(quad.accurate);
  EXPECT_LE(rel_state_err(q_infinity_apply(m, x), quad.value, m), 1e-6);
}

TEST(QInfinityApply, RandomModelsMatchQuadratureAllRegimes) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 12; ++i) {
    Model m = oracle::random_model(rng);
    // push the first mode into a chosen regime
    std::vector<double> kappa(m.kappa().begin(), m.kappa().end());
    const double a = m.a(), b = m.b();
    const bool room = kappa.size() == 1 || a * a / b < kappa[1];
    if (i % 3 == 1 && room) kappa[0] = 0.5 * a * a / b;
    if (i % 3 == 2 && room) kappa[0] = a * a / b;
    m = Model(a, b, kappa, m.q_matrix(), m.x0());
    const ModeState x = oracle::random_state(rng, m.modes());
    EXPECT_LE(rel_state_err(q_infinity_apply(m, x), quadrature(m, x).value, m), 1e-6) << i;
  }
}

TEST(QInfinityApply, MatchesLyapunovSolve) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    const Model m = oracle::random_model(rng, {1, 6, i % 2 == 0});
    const Eigen::MatrixXd ref = oracle::q_infinity_lyapunov(m);
    const Eigen::MatrixXd got = densify_q_infinity(m);
    EXPECT_LE((got - ref).norm(), 1e-10 * ref.norm()) << i;
  }
}

TEST(QInfinityApply, SelfAdjointAndPositive) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Model m = oracle::random_model(rng, {1, 5, false});
    const ModeState x = oracle::random_state(rng, m.modes());
    const ModeState y = oracle::random_state(rng, m.modes());
    const double xy = v_inner(q_infinity_apply(m, x), y, m);
    const double yx = v_inner(x, q_infinity_apply(m, y), m);
    EXPECT_NEAR(xy, yx, 1e-10 * std::max(1.0, std::abs(xy)));
    EXPECT_GE(v_inner(q_infinity_apply(m, x), x, m), -1e-12);
  }
}

TEST(QuadratureOracle, DiagonalSingleMode) {
  for (double k : {0.2, 1.0, 5.0}) {
    Eigen::MatrixXd q(1, 1);
    q << 2.5;
    const Model m(1.0, 1.0, {k}, q, {{1, 1}});
    const ModeState x{{0.7, -0.4}};
    const double t_max = 20.0 / slowest_decay_rate(m);
    const auto fine = q_infinity_quadrature_oracle(m, x, t_max, static_cast<int>(200.0 * t_max * std::max(max_frequency(m), 1.0)));
    EXPECT_LE(rel_state_err(fine.value, q_infinity_apply(m, x), m), 1e-8) << k;
  }
}

TEST(QuadratureOracle, ZeroNoiseAndLinearity) {
  const Model m = two_mode_nondiagonal();
  const ModeState x{{1, 0}, {0, 1}};
  const Model zero = m.with_q_matrix(Eigen::MatrixXd::Zero(2, 2));
  for (const auto& p : quadrature(zero, x).value) {
    EXPECT_EQ(p.u, 0.0);
    EXPECT_EQ(p.v, 0.0);
  }
  const auto single = quadrature(m, x).value;
  const auto twice = quadrature(m.with_q_matrix(2.0 * m.q_matrix()), x).value;
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(twice[i].u, 2 * single[i].u, 1e-12);
    EXPECT_NEAR(twice[i].v, 2 * single[i].v, 1e-12);
  }
}

TEST(QuadratureOracle, FlagsShortHorizon) {
  const Model m = two_mode_nondiagonal();
  const auto r = q_infinity_quadrature_oracle(m, ModeState{{1, 0}, {0, 1}}, 1.0, 100);
  EXPECT_FALSE(r.accurate);
  EXPECT_GT(r.tail_bound, 1e-10);
}

TEST(TraceQInfinity, ReferenceValues) {
  const auto s = trace_q_infinity(oracle::reference_model());
  EXPECT_NEAR(s.total, 2324.652, 1e-3);
  EXPECT_NEAR(s.position, 1937.210, 1e-3);
  EXPECT_NEAR(s.velocity, 387.442, 1e-3);
}

TEST(TraceQInfinity, UnitExample) {
  const Model m(1.0, 1.0, {1.0, 2.0}, Eigen::MatrixXd::Identity(2, 2) * 2.0, {{1, 1}, {1, 1}});
  const auto s = trace_q_infinity(m);
  EXPECT_DOUBLE_EQ(s.total, 2.0);
  EXPECT_DOUBLE_EQ(s.position, 1.0);
  EXPECT_DOUBLE_EQ(s.velocity, 1.0);
}

TEST(TraceQInfinity, MatchesBruteForceBasisSum) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const Model m = oracle::random_model(rng, {1, 6, i % 2 == 0});
    const double ref = oracle::brute_force_trace(m);
    EXPECT_NEAR(trace_q_infinity(m).total, ref, 1e-9 * ref);
  }
  const double ref = oracle::brute_force_trace(oracle::reference_model());
  EXPECT_NEAR(trace_q_infinity(oracle::reference_model()).total, ref, 1e-9 * ref);
}

TEST(CltTrace, MatchesLyapunovCovariance) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 40; ++i) {
    const Model m = oracle::random_model(rng, {1, 5, i % 2 == 0});
    for (auto op : {CltOperator::Rtilde, CltOperator::Rtilde1, CltOperator::Rtilde2}) {
      const double ref = oracle::clt_trace_lyapunov(m, op);
      EXPECT_NEAR(clt_trace(m, op), ref, 1e-9 * std::abs(ref)) << i << ' ' << to_string(op);
    }
  }
}

TEST(CltTrace, DecompositionIdentity) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Model m = oracle::random_model(rng, {1, 6, false});
    const double b = m.b();
    const double lhs = clt_trace(m, CltOperator::Rtilde);
    const double rhs = clt_trace(m, CltOperator::Rtilde1) + clt_trace(m, CltOperator::Rtilde2) / ((b + 1) * (b + 1));
    EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
  }
}

TEST(CltTrace, DiagonalRtilde1) {
  const Model m = oracle::reference_model();
  double tr_q2 = 0.0;
  for (std::size_t n = 0; n < m.modes(); ++n) tr_q2 += m.lambda(n) * m.lambda(n);
  EXPECT_NEAR(clt_trace(m, CltOperator::Rtilde1), tr_q2 / (4 * m.a()), 1e-12 * tr_q2);
  const double tr = trace_q(m);
  EXPECT_NEAR(clt_trace(m, CltOperator::Rtilde1), 0.4505 * tr * tr / (4 * m.a() * m.a()), 1e-3 * tr * tr);
}

TEST(AsymptoticVariances, ReferenceSetup) {
  const Model m = oracle::reference_model();
  const auto v = asymptotic_variances(m);
  EXPECT_NEAR(v.a_hat, 1.0466, 5e-4);
  EXPECT_NEAR(v.a_tilde, 0.4505, 5e-4);
  EXPECT_NEAR(v.b_tilde, 0.0343, 5e-4);
  // b_hat from the independent covariance oracle
  const double tr = trace_q(m);
  const double ref = 4 * 0.04 * 1.44 / (tr * tr) * oracle::clt_trace_lyapunov(m, CltOperator::Rtilde);
  EXPECT_NEAR(v.b_hat, ref, 1e-10);
  EXPECT_TRUE(v.diagonal_case);
}

TEST(AsymptoticVariances, SingleModeUnit) {
  Eigen::MatrixXd q(1, 1);
  q << 1.0;
  const auto v = asymptotic_variances(Model(1.0, 1.0, {2.0}, q, {{1, 1}}));
  EXPECT_DOUBLE_EQ(v.a_tilde, 1.0);
}

TEST(AsymptoticVariances, ZeroTraceRejected) {
  const Model m(1.0, 1.0, {1.0}, Eigen::MatrixXd::Zero(1, 1), {{1, 1}});
  EXPECT_THROW(asymptotic_variances(m), DomainError);
  EXPECT_THROW(asymptotic_variances_diagonal(m), DomainError);
}

TEST(AsymptoticVariances, TildeFamilyStrictlySmaller) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const Model m = oracle::random_model(rng, {1, 6, i % 2 == 0});
    const auto v = asymptotic_variances(m);
    EXPECT_LT(v.a_tilde, v.a_hat);
    EXPECT_LT(v.b_tilde, v.b_hat);
  }
}

TEST(AsymptoticVariances, DiagonalShortcutAgrees) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const Model m = oracle::random_model(rng, {1, 10, true});
    const auto g = asymptotic_variances(m);
    const auto d = asymptotic_variances_diagonal(m);
    EXPECT_NEAR(g.a_hat, d.a_hat, 1e-12 * g.a_hat);
    EXPECT_NEAR(g.b_hat, d.b_hat, 1e-12 * g.b_hat);
    EXPECT_NEAR(g.a_tilde, d.a_tilde, 1e-12 * g.a_tilde);
    EXPECT_NEAR(g.b_tilde, d.b_tilde, 1e-12 * g.b_tilde);
  }
  EXPECT_THROW(asymptotic_variances_diagonal(two_mode_nondiagonal()), UnsupportedError);
  EXPECT_FALSE(asymptotic_variances(two_mode_nondiagonal()).diagonal_case);
}

TEST(PairwiseSum, MatchesAccurateSum) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}
