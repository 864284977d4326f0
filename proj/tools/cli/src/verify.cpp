#include "waveinfer_cli/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include <waveinfer/covariance.hpp>
#include <waveinfer/rng.hpp>
#include <waveinfer/semigroup.hpp>
#include <waveinfer/simulate.hpp>

namespace waveinfer::cli {
namespace {

/// Counter-based uniform stream in [0, 1).
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : seed_(seed) {}
  double operator()() { return static_cast<double>(replication_seed(seed_, counter_++) >> 11) * 0x1.0p-53; }
  double in(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
  double log_in(double lo, double hi) { return std::exp(in(std::log(lo), std::log(hi))); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

double propagator_error(double a, double b, double kappa, double t) {
  const auto exact = expm_oracle(mode_generator(a, b, kappa), t);
  const auto got = mode_propagator(a, b, kappa, t);
  return max_abs_diff(got, exact) / std::max(1.0, exact.max_abs());
}

Model random_model(Uniform& rng, std::size_t n) {
  const double a = rng.in(0.3, 1.5);
  const double b = rng.in(0.3, 2.0);
  std::vector<double> kappa(n);
  double k = rng.in(0.5, 3.0);
  for (auto& v : kappa) {
    v = k;
    k += rng.in(0.5, 10.0);
  }
  Eigen::MatrixXd l(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    for (Eigen::Index j = 0; j < l.cols(); ++j) l(i, j) = rng.in(-1.0, 1.0);
  Eigen::MatrixXd q = l * l.transpose();
  ModeState x0(n, ModePair{1.0, 1.0});
  return Model(a, b, std::move(kappa), std::move(q), std::move(x0));
}

ModeState random_state(Uniform& rng, std::size_t n) {
  ModeState x(n);
  for (auto& p : x) p = {rng.in(-1.0, 1.0), rng.in(-1.0, 1.0)};
  return x;
}

double q_infinity_error(const Model& model, std::span<const ModePair> x) {
  const double rho = slowest_decay_rate(model);
  const double t_max = 16.0 / rho;
  const double rate = std::max({max_frequency(model), model.a(), 1.0});
  const int steps = static_cast<int>(std::clamp(std::ceil(t_max * rate * 80.0), 2000.0, 4.0e6));
  const auto quad = q_infinity_quadrature_oracle(model, x, t_max, steps);
  const auto got = q_infinity_apply(model, x);
  ModeState diff(got.size());
  for (std::size_t n = 0; n < got.size(); ++n) diff[n] = {got[n].u - quad.value[n].u, got[n].v - quad.value[n].v};
  const double scale = std::sqrt(v_inner(quad.value, quad.value, model));
  const double err = std::sqrt(v_inner(diff, diff, model));
  return scale > 0.0 ? err / scale : err;
}

double lyapunov_error(double a, double b, double kappa, ModePair x) {
  const auto m = mode_generator(a, b, kappa);
  const auto r = r_matrices(a, b, kappa);
  const ModePair mx = m.apply(x);
  const double energy = v_inner(x, x, kappa);
  const std::array<std::pair<ModeMatrix2x2, double>, 3> cases = {{
      {r.r, -2.0 * a * b / (b + 1.0) * energy},
      {r.r1, -2.0 * a * x.v * x.v},
      {r.r2, -2.0 * a * b * kappa * x.u * x.u},
  }};
  double worst = 0.0;
  for (const auto& [mat, expected] : cases) {
    const ModePair rx = mat.apply(x);
    const double lhs = v_inner(rx, mx, kappa);
    const double scale = std::sqrt(v_inner(rx, rx, kappa) * v_inner(mx, mx, kappa));
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - expected) / scale);
  }
  return worst;
}

Model leading_modes(const Model& model, std::size_t n) {
  const auto k = model.kappa();
  const auto idx = static_cast<Eigen::Index>(n);
  ModeState x0(model.x0().begin(), model.x0().begin() + static_cast<std::ptrdiff_t>(n));
  return Model(model.a(), model.b(), std::vector<double>(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(n)),
               model.q_matrix().topLeftCorner(idx, idx), std::move(x0));
}

/// Largest Euler step (0.004 / 2^k) with omega_max^2 dt <= a / 2.
double ito_step(const Model& model) {
  const double b_kappa = model.b() * model.kappa().back();
  double dt = 0.004;
  while (b_kappa * dt > model.a() / 2.0 && dt > 1e-9) dt /= 2.0;
  return dt;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

SuiteResult verify_semigroup(const Model& model, std::uint64_t seed, double tolerance) {
  SuiteResult res{"semigroup vs expm", false, 0.0, tolerance, 0, {}};
  Uniform rng(seed ^ 0x5e51u);
  std::array<double, 3> worst_by_class{};
  for (int i = 0; i < 300; ++i) {
    const double a = rng.log_in(0.05, 5.0);
    const double b = rng.log_in(0.05, 5.0);
    double delta = 0.0;
    switch (i % 3) {
      case 0: delta = a * a * rng.log_in(1e-6, 1e3); break;
      case 1: delta = -a * a * rng.in(1e-6, 0.999); break;
      case 2: delta = rng.in(-1e-9, 1e-9); break;
    }
    const double kappa = (a * a + delta) / b;
    const double t = rng.in(0.0, 5.0);
    const double err = propagator_error(a, b, kappa, t);
    worst_by_class[static_cast<std::size_t>(i % 3)] = std::max(worst_by_class[static_cast<std::size_t>(i % 3)], err);
    ++res.cases;
  }
  double worst_model = 0.0;
  for (double kappa : model.kappa()) {
    for (double t : {0.0, 1e-3, 0.1, 0.5, 1.0, 3.0}) {
      worst_model = std::max(worst_model, propagator_error(model.a(), model.b(), kappa, t));
      ++res.cases;
    }
  }
  res.worst = std::max({worst_by_class[0], worst_by_class[1], worst_by_class[2], worst_model});
  res.passed = res.worst <= tolerance;
  res.detail = fmt::format("oscillatory {:.2e}, overdamped {:.2e}, near-critical {:.2e}, model modes {:.2e}",
                           worst_by_class[0], worst_by_class[1], worst_by_class[2], worst_model);
  return res;
}

SuiteResult verify_q_infinity(const Model& model, std::uint64_t seed, double tolerance) {
  SuiteResult res{"q_infinity vs quadrature", false, 0.0, tolerance, 0, {}};
  Uniform rng(seed ^ 0x91u);
  double worst_random = 0.0;
  for (int i = 0; i < 12; ++i) {
    const auto m = random_model(rng, 1 + static_cast<std::size_t>(i % 4));
    const auto x = random_state(rng, m.modes());
    worst_random = std::max(worst_random, q_infinity_error(m, x));
    ++res.cases;
  }
  double worst_model = 0.0;
  if (trace_q(model) > 0.0 && model.modes() <= 32) {
    const auto x = random_state(rng, model.modes());
    worst_model = q_infinity_error(model, x);
    ++res.cases;
  }
  res.worst = std::max(worst_random, worst_model);
  res.passed = res.worst <= tolerance;
  res.detail = fmt::format("random non-diagonal N<=4 {:.2e}, model {:.2e}", worst_random, worst_model);
  return res;
}

SuiteResult verify_lyapunov(const Model& model, std::uint64_t seed, double tolerance) {
  SuiteResult res{"Lyapunov identities", false, 0.0, tolerance, 0, {}};
  Uniform rng(seed ^ 0x1a9u);
  for (double kappa : model.kappa()) {
    for (int i = 0; i < 100; ++i) {
      res.worst = std::max(res.worst, lyapunov_error(model.a(), model.b(), kappa, {rng.in(-1, 1), rng.in(-1, 1)}));
      ++res.cases;
    }
  }
  for (int i = 0; i < 100; ++i) {
    const double a = rng.log_in(0.05, 5.0), b = rng.log_in(0.05, 5.0), kappa = rng.log_in(0.1, 1e4);
    res.worst = std::max(res.worst, lyapunov_error(a, b, kappa, {rng.in(-1, 1), rng.in(-1, 1)}));
    ++res.cases;
  }
  res.passed = res.worst <= tolerance;
  res.detail = "R, R1, R2";
  return res;
}

SuiteResult verify_ito(const Model& model, std::uint64_t seed) {
  SuiteResult res{"Ito residual decay", false, 0.0, 0.0, 0, {}};
  Model m = model;
  while (m.modes() > 1 && ito_step(m) < 2.5e-4) m = leading_modes(m, m.modes() - 1);
  const double dt = ito_step(m);
  const double T = 100.0;
  constexpr int kBatch = 16;
  constexpr int kMaxSeeds = 512;
  constexpr std::array<ItoIdentity, 3> kinds = {ItoIdentity::R, ItoIdentity::R1, ItoIdentity::R2};

  // per level and identity: running sum and sum of squares of the signed defect
  std::array<std::array<double, 3>, 2> sum{}, sum_sq{}, mean{};
  int seeds = 0;
  auto resolved = [&] {
    for (int level = 0; level < 2; ++level)
      for (std::size_t j = 0; j < kinds.size(); ++j) {
        const double mu = sum[level][j] / seeds;
        const double var = (sum_sq[level][j] - seeds * mu * mu) / (seeds - 1);
        if (std::sqrt(std::max(var, 0.0) / seeds) > 0.05 * std::abs(mu)) return false;
      }
    return true;
  };
  while (seeds < kMaxSeeds && (seeds == 0 || !resolved())) {
    for (int k = seeds; k < seeds + kBatch; ++k)
      for (int level = 0; level < 2; ++level) {
        const double h = dt / (level == 0 ? 1.0 : 2.0);
        const auto path = simulate_path(m, Scheme::Euler, h, T, replication_seed(seed, static_cast<std::uint64_t>(k)),
                                        RecordOptions{true, 0});
        for (std::size_t j = 0; j < kinds.size(); ++j) {
          const double d = ito_identity_defect(path.stats, m, kinds[j]);
          sum[level][j] += d;
          sum_sq[level][j] += d * d;
        }
        ++res.cases;
      }
    seeds += kBatch;
  }
  for (int level = 0; level < 2; ++level)
    for (std::size_t j = 0; j < kinds.size(); ++j) mean[level][j] = sum[level][j] / seeds;
  res.passed = true;
  double worst = 0.0;
  std::string ratios;
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    const double ratio = mean[0][j] / mean[1][j];
    const bool ok = std::isfinite(ratio) && ratio >= 1.6 && ratio <= 2.5;
    res.passed = res.passed && ok;
    worst = std::max(worst, std::abs(ratio - 2.0));
    ratios += fmt::format("{}{} {:.3f}", j ? ", " : "", to_string(kinds[j]), ratio);
  }
  res.worst = worst;
  res.tolerance = 0.5;
  res.detail = fmt::format("dt {} -> {} over {} modes, T {}, {} seeds; decay ratios {}", dt, dt / 2, m.modes(), T,
                           seeds, ratios);
  return res;
}

VerifyReport run_verify(const Model& model, std::uint64_t seed) {
  VerifyReport report;
  report.suites.push_back(verify_semigroup(model, seed));
  report.suites.push_back(verify_q_infinity(model, seed));
  report.suites.push_back(verify_lyapunov(model, seed));
  report.suites.push_back(verify_ito(model, seed));
  return report;
}

}  // namespace waveinfer::cli
