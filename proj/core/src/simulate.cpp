#include "waveinfer/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "waveinfer/covariance.hpp"
#include "waveinfer/errors.hpp"
#include "waveinfer/rng.hpp"

namespace waveinfer {

std::string_view to_string(Scheme scheme) { return scheme == Scheme::Euler ? "euler" : "exact"; }

Scheme parse_scheme(std::string_view text) {
  if (text == "euler") return Scheme::Euler;
  if (text == "exact") return Scheme::Exact;
  throw ConfigError(fmt::format("unknown scheme '{}' (expected euler|exact)", text));
}

std::string_view to_string(ItoIdentity which) {
  switch (which) {
    case ItoIdentity::R: return "R";
    case ItoIdentity::R1: return "R1";
    case ItoIdentity::R2: return "R2";
  }
  return "unknown";
}

NoiseFactor::NoiseFactor(Eigen::MatrixXd factor, bool diagonal)
    : factor_(std::move(factor)), diagonal_(diagonal) {
  amplitudes_.resize(static_cast<std::size_t>(factor_.rows()));
  for (Eigen::Index i = 0; i < factor_.rows(); ++i) amplitudes_[static_cast<std::size_t>(i)] = factor_(i, i);
}

void NoiseFactor::apply(std::span<const double> xi, std::span<double> out) const {
  const auto n = amplitudes_.size();
  if (xi.size() != n || out.size() != n) throw ShapeError("noise factor size mismatch");
  if (diagonal_) {
    for (std::size_t i = 0; i < n; ++i) out[i] = amplitudes_[i] * xi[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += factor_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * xi[j];
    out[i] = s;
  }
}

NoiseFactor noise_factor(const Model& model) {
  const auto& q = model.q_matrix();
  if (model.q_is_diagonal()) {
    Eigen::VectorXd d = q.diagonal();
    if (d.minCoeff() < 0.0) throw NumericError("q matrix has a negative diagonal entry");
    return NoiseFactor(Eigen::MatrixXd(d.cwiseSqrt().asDiagonal()), true);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of q matrix failed");
  Eigen::VectorXd values = eig.eigenvalues();
  const double floor = -1e-10 * std::max(q.trace(), 0.0);
  if (values.minCoeff() < floor)
    throw NumericError(fmt::format("q matrix is indefinite (eigenvalue {})", values.minCoeff()));
  values = values.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd f = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return NoiseFactor(std::move(f), false);
}

ModeMatrix2x2 transition_covariance(double a, double b, double kappa, double lambda, double dt) {
  if (!(dt >= 0.0)) throw DomainError("transition horizon must be >= 0");
  if (lambda == 0.0 || dt == 0.0) return ModeMatrix2x2::zero();
  const double d = b * kappa - a * a;
  const double rate = a + std::sqrt(std::abs(d)) + 1.0 / dt;
  const int panels = std::max(1, static_cast<int>(std::ceil(dt * rate / 2.0)));
  const double width = dt / panels;
  using Rule = boost::math::quadrature::gauss<double, 20>;
  double c11 = 0.0;
  double c12 = 0.0;
  double c22 = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = width * p;
    const double hi = p + 1 == panels ? dt : width * (p + 1);
    c11 += Rule::integrate([&](double s) {
      const double x = mode_propagator(a, b, kappa, s).m12;
      return x * x;
    }, lo, hi);
    c12 += Rule::integrate([&](double s) {
      const auto m = mode_propagator(a, b, kappa, s);
      return m.m12 * m.m22;
    }, lo, hi);
    c22 += Rule::integrate([&](double s) {
      const double x = mode_propagator(a, b, kappa, s).m22;
      return x * x;
    }, lo, hi);
  }
  return {lambda * c11, lambda * c12, lambda * c12, lambda * c22};
}

ExactTransition exact_transition(const Model& model, std::size_t mode, double dt) {
  if (!model.q_is_diagonal())
    throw UnsupportedError("exact transition sampling needs a diagonal q matrix");
  if (mode >= model.modes()) throw ShapeError(fmt::format("mode index {} out of range", mode));
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  ExactTransition out;
  out.propagator = mode_propagator(model.a(), model.b(), model.kappa(mode), dt);
  out.noise_cov = transition_covariance(model.a(), model.b(), model.kappa(mode), model.lambda(mode), dt);
  const auto& c = out.noise_cov;
  if (c.m11 > 0.0) {
    const double l11 = std::sqrt(c.m11);
    const double l21 = c.m12 / l11;
    const double l22 = std::sqrt(std::max(0.0, c.m22 - l21 * l21));
    out.noise_chol = {l11, 0.0, l21, l22};
  } else {
    out.noise_chol = {0.0, 0.0, 0.0, std::sqrt(std::max(0.0, c.m22))};
  }
  return out;
}

namespace {

std::size_t checked_steps(double dt, double T) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError(fmt::format("dt must be positive, got {}", dt));
  if (!(T >= dt) || !std::isfinite(T))
    throw DomainError(fmt::format("T must be finite and >= dt, got T={} dt={}", T, dt));
  const double ratio = T / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio)
    throw DomainError(fmt::format("T/dt must be an integer, got {}", ratio));
  return static_cast<std::size_t>(rounded);
}

void record_sample(std::vector<TrajectorySample>& out, std::size_t step, double dt, double y_sum,
                   double h_sum) {
  const double t = dt * static_cast<double>(step);
  const double y = y_sum / static_cast<double>(step);
  const double h = h_sum / static_cast<double>(step);
  out.push_back({t, y + h, y, h});
}

}  // namespace

PathResult simulate_path(const Model& model, Scheme scheme, double dt, double T, std::uint64_t seed,
                         const RecordOptions& record) {
  const std::size_t steps = checked_steps(dt, T);
  if (scheme == Scheme::Exact && !model.q_is_diagonal())
    throw UnsupportedError("exact scheme needs a diagonal q matrix; use the euler scheme");
  if (scheme == Scheme::Exact && record.ito)
    throw UnsupportedError("Ito integrals are only recorded for the euler scheme");

  const auto n_modes = model.modes();
  const double a = model.a();
  const double b = model.b();
  const auto kappa = model.kappa();
  const double sqrt_dt = std::sqrt(dt);
  const double c_r = 2.0 * a / (b + 1.0);

  ModeState x = model.x0();
  GaussianStream gauss(seed);
  PathResult result;
  if (record.decimation > 0) {
    result.trajectory.reserve(steps / record.decimation + 2);
    double y0 = 0.0;
    double h0 = 0.0;
    for (std::size_t n = 0; n < n_modes; ++n) {
      y0 += kappa[n] * x[n].u * x[n].u;
      h0 += x[n].v * x[n].v;
    }
    result.trajectory.push_back({0.0, y0 + h0, y0, h0});
  }

  const NoiseFactor factor = noise_factor(model);
  std::vector<double> xi(n_modes);
  std::vector<double> noise(n_modes);
  std::vector<double> neg_bk(n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) neg_bk[n] = -b * kappa[n];

  std::vector<ExactTransition> exact;
  if (scheme == Scheme::Exact) {
    exact.reserve(n_modes);
    for (std::size_t n = 0; n < n_modes; ++n) exact.push_back(exact_transition(model, n, dt));
  }

  double y_sum = 0.0;
  double h_sum = 0.0;
  ItoIntegrals ito;

  for (std::size_t step = 0; step < steps; ++step) {
    double y_step = 0.0;
    double h_step = 0.0;
    for (std::size_t n = 0; n < n_modes; ++n) {
      y_step += kappa[n] * x[n].u * x[n].u;
      h_step += x[n].v * x[n].v;
    }
    if (!std::isfinite(y_step + h_step))
      throw NumericError(fmt::format("path blew up at step {} (t = {}, seed {})", step,
                                     dt * static_cast<double>(step), seed));
    y_sum += y_step;
    h_sum += h_step;

    if (scheme == Scheme::Euler) {
      if (factor.diagonal()) {
        const auto amp = factor.amplitudes();
        for (std::size_t n = 0; n < n_modes; ++n) noise[n] = amp[n] * sqrt_dt * gauss.next();
      } else {
        for (std::size_t n = 0; n < n_modes; ++n) xi[n] = sqrt_dt * gauss.next();
        factor.apply(xi, noise);
      }
      if (record.ito) {
        for (std::size_t n = 0; n < n_modes; ++n) {
          ito.r += (c_r * x[n].u + x[n].v) * noise[n];
          ito.r1 += x[n].v * noise[n];
          ito.r2 += (2.0 * a * x[n].u + x[n].v) * noise[n];
        }
      }
      for (std::size_t n = 0; n < n_modes; ++n) {
        const double u = x[n].u;
        const double v = x[n].v;
        x[n].u = u + v * dt;
        x[n].v = v + (neg_bk[n] * u - 2.0 * a * v) * dt + noise[n];
      }
    } else {
      for (std::size_t n = 0; n < n_modes; ++n) {
        const auto& tr = exact[n];
        const double z1 = gauss.next();
        const double z2 = gauss.next();
        const ModePair next = tr.propagator.apply(x[n]);
        x[n].u = next.u + tr.noise_chol.m11 * z1;
        x[n].v = next.v + tr.noise_chol.m21 * z1 + tr.noise_chol.m22 * z2;
      }
    }

    if (record.decimation > 0 && (step + 1) % record.decimation == 0)
      record_sample(result.trajectory, step + 1, dt, y_sum, h_sum);
  }
  for (const auto& p : x)
    if (!std::isfinite(p.u) || !std::isfinite(p.v))
      throw NumericError(fmt::format("path blew up at step {} (seed {})", steps, seed));
  if (record.decimation > 0 && steps % record.decimation != 0)
    record_sample(result.trajectory, steps, dt, y_sum, h_sum);

  auto& s = result.stats;
  s.Y_T = y_sum / static_cast<double>(steps);
  s.H_T = h_sum / static_cast<double>(steps);
  s.I_T = s.Y_T + s.H_T;
  s.T = dt * static_cast<double>(steps);
  s.dt = dt;
  s.steps = steps;
  s.scheme = scheme;
  s.seed = seed;
  s.final_state = std::move(x);
  if (record.ito) s.ito = ito;
  return result;
}

double ito_identity_defect(const PathStatistics& stats, const Model& model, ItoIdentity which) {
  if (!stats.ito) throw UsageError("path statistics were recorded without Ito integrals");
  if (stats.final_state.size() != model.modes()) throw ShapeError("final state does not match model");
  const double a = model.a();
  const double b = model.b();
  const double T = stats.T;
  const double tr = trace_q(model);
  const auto kappa = model.kappa();

  // Energy change <R X(T), X(T)>_V - <R x0, x0>_V; R depends on kappa per mode.
  double energy = 0.0;
  for (std::size_t n = 0; n < model.modes(); ++n) {
    const auto rm = r_matrices(a, b, kappa[n]);
    const ModeMatrix2x2& m = which == ItoIdentity::R ? rm.r : which == ItoIdentity::R1 ? rm.r1 : rm.r2;
    const ModePair xt = stats.final_state[n];
    const ModePair x0 = model.x0()[n];
    energy += v_inner(m.apply(xt), xt, kappa[n]) - v_inner(m.apply(x0), x0, kappa[n]);
  }

  switch (which) {
    case ItoIdentity::R: {
      const double c = (b + 1.0) / (4.0 * a * b);
      return stats.I_T - (-c / T * energy + 2.0 * c / T * stats.ito->r + c * tr);
    }
    case ItoIdentity::R1: {
      const double c = 1.0 / (4.0 * a);
      return stats.H_T - (-c / T * energy + 2.0 * c / T * stats.ito->r1 + c * tr);
    }
    case ItoIdentity::R2: {
      const double c = 1.0 / (4.0 * a * b);
      return stats.Y_T - (-c / T * energy + 2.0 * c / T * stats.ito->r2 + c * tr);
    }
  }
  return 0.0;
}

double ito_identity_residual(const PathStatistics& stats, const Model& model, ItoIdentity which) {
  return std::abs(ito_identity_defect(stats, model, which));
}

}  // namespace waveinfer
