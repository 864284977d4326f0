#include "waveinfer/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "waveinfer/errors.hpp"
#include "waveinfer/semigroup.hpp"

namespace waveinfer {

namespace {

double denominator(double a, double b, double kn, double kk) {
  const double diff = kn - kk;
  return b * b * diff * diff + 8.0 * a * a * b * (kn + kk);
}

void check_shape(const Model& model, std::span<const ModePair> x) {
  if (x.size() != model.modes())
    throw ShapeError(fmt::format("expected {} mode pairs, got {}", model.modes(), x.size()));
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ModeState q_infinity_apply(const Model& model, std::span<const ModePair> x) {
  check_shape(model, x);
  const auto n_modes = model.modes();
  const double a = model.a();
  const double b = model.b();
  const auto kappa = model.kappa();
  const auto& q = model.q_matrix();
  ModeState y(n_modes);

  if (model.q_is_diagonal()) {
    for (std::size_t n = 0; n < n_modes; ++n) {
      const double lam = model.lambda(n);
      y[n] = {lam * x[n].u / (4.0 * a * b), lam * x[n].v / (4.0 * a)};
    }
    return y;
  }

  std::vector<double> tu(n_modes);
  std::vector<double> tv(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    const double kk = kappa[k];
    for (std::size_t n = 0; n < n_modes; ++n) {
      const double kn = kappa[n];
      const double w = q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) /
                       denominator(a, b, kn, kk);
      tu[n] = (4.0 * a * kn * x[n].u + b * (kk - kn) * x[n].v) * w;
      tv[n] = (b * kn * (kn - kk) * x[n].u + 2.0 * a * b * (kn + kk) * x[n].v) * w;
    }
    y[k] = {pairwise_sum(tu), pairwise_sum(tv)};
  }
  return y;
}

Eigen::MatrixXd densify_q_infinity(const Model& model) {
  const auto n_modes = model.modes();
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd dense(dim, dim);
  ModeState e(n_modes);
  for (Eigen::Index col = 0; col < dim; ++col) {
    std::fill(e.begin(), e.end(), ModePair{});
    const auto mode = static_cast<std::size_t>(col) % n_modes;
    if (static_cast<std::size_t>(col) < n_modes)
      e[mode].u = 1.0;
    else
      e[mode].v = 1.0;
    const auto y = q_infinity_apply(model, e);
    for (std::size_t n = 0; n < n_modes; ++n) {
      dense(static_cast<Eigen::Index>(n), col) = y[n].u;
      dense(static_cast<Eigen::Index>(n + n_modes), col) = y[n].v;
    }
  }
  return dense;
}

double slowest_decay_rate(const Model& model) {
  const double a = model.a();
  double rho = a;
  for (double k : model.kappa()) {
    const double d = a * a - model.b() * k;
    if (d > 0.0) rho = std::min(rho, model.b() * k / (a + std::sqrt(d)));
  }
  return rho;
}

double max_frequency(const Model& model) {
  double w = 0.0;
  for (double k : model.kappa()) {
    const double d = model.b() * k - model.a() * model.a();
    if (d > 0.0) w = std::max(w, std::sqrt(d));
  }
  return w;
}

QuadratureResult q_infinity_quadrature_oracle(const Model& model, std::span<const ModePair> x,
                                              double t_max, int steps) {
  check_shape(model, x);
  if (!(t_max > 0.0)) throw DomainError("quadrature horizon must be positive");
  if (steps < 2) throw DomainError("quadrature needs at least 2 steps");
  if (steps % 2 != 0) ++steps;

  const auto n_modes = model.modes();
  const auto kappa = model.kappa();
  const auto& q = model.q_matrix();
  const double h = t_max / steps;

  // Energy-space adjoint of S in coordinates is W^{-1} P^T W with W = diag(kappa, 1),
  // so S Phi Phi^* S^* x = P G P^T (W x) where G has Q in the velocity block.
  std::vector<double> wx_u(n_modes);
  std::vector<double> wx_v(n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) {
    wx_u[n] = kappa[n] * x[n].u;
    wx_v[n] = x[n].v;
  }

  ModeState acc(n_modes);
  std::vector<ModeMatrix2x2> prop(n_modes);
  Eigen::VectorXd zv(static_cast<Eigen::Index>(n_modes));
  for (int i = 0; i <= steps; ++i) {
    const double t = h * i;
    const double weight = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    for (std::size_t n = 0; n < n_modes; ++n) {
      prop[n] = mode_propagator(model.a(), model.b(), kappa[n], t);
      // velocity component of P^T (W x)
      zv(static_cast<Eigen::Index>(n)) = prop[n].m12 * wx_u[n] + prop[n].m22 * wx_v[n];
    }
    const Eigen::VectorXd s = q * zv;
    for (std::size_t n = 0; n < n_modes; ++n) {
      const double sn = s(static_cast<Eigen::Index>(n));
      acc[n].u += weight * prop[n].m12 * sn;
      acc[n].v += weight * prop[n].m22 * sn;
    }
  }

  QuadratureResult out;
  out.value.resize(n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) out.value[n] = {acc[n].u * h / 3.0, acc[n].v * h / 3.0};
  out.tail_bound = std::exp(-2.0 * slowest_decay_rate(model) * t_max);
  out.accurate = out.tail_bound < 1e-10;
  out.nodes = steps + 1;
  return out;
}

TraceSplit trace_q_infinity(const Model& model) {
  const double tr = trace_q(model);
  const double a = model.a();
  const double b = model.b();
  return {(b + 1.0) / (4.0 * a * b) * tr, tr / (4.0 * a * b), tr / (4.0 * a)};
}

std::string_view to_string(CltOperator op) {
  switch (op) {
    case CltOperator::Rtilde: return "Rtilde";
    case CltOperator::Rtilde1: return "Rtilde1";
    case CltOperator::Rtilde2: return "Rtilde2";
  }
  return "unknown";
}

double clt_trace(const Model& model, CltOperator op) {
  const auto n_modes = model.modes();
  const double a = model.a();
  const double b = model.b();
  const double bp1sq = (b + 1.0) * (b + 1.0);
  const auto kappa = model.kappa();
  const auto& q = model.q_matrix();
  std::vector<double> terms;
  terms.reserve(n_modes * n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) {
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double qnk = q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
      if (qnk == 0.0) {
        terms.push_back(0.0);
        continue;
      }
      const double ksum = kappa[n] + kappa[k];
      double numerator = 0.0;
      switch (op) {
        case CltOperator::Rtilde:
          numerator = (16.0 * a * a * a + 2.0 * a * b * bp1sq * ksum) / bp1sq;
          break;
        case CltOperator::Rtilde1: numerator = 2.0 * a * b * ksum; break;
        case CltOperator::Rtilde2: numerator = 16.0 * a * a * a; break;
      }
      terms.push_back(numerator / denominator(a, b, kappa[n], kappa[k]) * qnk * qnk);
    }
  }
  return pairwise_sum(terms);
}

AsymptoticVariances asymptotic_variances(const Model& model) {
  const double tr = trace_q(model);
  if (!(tr > 0.0)) throw DomainError("asymptotic variances need Tr Q > 0");
  const double a = model.a();
  const double b = model.b();
  const double tr2 = tr * tr;
  const double r = clt_trace(model, CltOperator::Rtilde);
  AsymptoticVariances v;
  v.a_hat = 4.0 * a * a / tr2 * r;
  v.b_hat = 4.0 * b * b * (b + 1.0) * (b + 1.0) / tr2 * r;
  v.a_tilde = 4.0 * a * a / tr2 * clt_trace(model, CltOperator::Rtilde1);
  v.b_tilde = 4.0 * b * b / tr2 * clt_trace(model, CltOperator::Rtilde2);
  v.diagonal_case = model.q_is_diagonal();
  return v;
}

AsymptoticVariances asymptotic_variances_diagonal(const Model& model) {
  if (!model.q_is_diagonal())
    throw UnsupportedError("diagonal-case variance formulas need a diagonal q matrix");
  const double tr = trace_q(model);
  if (!(tr > 0.0)) throw DomainError("asymptotic variances need Tr Q > 0");
  const double a = model.a();
  const double b = model.b();
  std::vector<double> sq(model.modes());
  std::vector<double> sq_over_kappa(model.modes());
  for (std::size_t n = 0; n < model.modes(); ++n) {
    const double lam = model.lambda(n);
    sq[n] = lam * lam;
    sq_over_kappa[n] = lam * lam / model.kappa(n);
  }
  const double tr_q2 = pairwise_sum(sq);
  const double tr_q2_inv_a = pairwise_sum(sq_over_kappa);
  const double tr2 = tr * tr;
  const double bp1sq = (b + 1.0) * (b + 1.0);
  AsymptoticVariances v;
  v.a_hat = (4.0 * a * a * a / (b * bp1sq) * tr_q2_inv_a + a * tr_q2) / tr2;
  v.b_hat = (4.0 * a * b * tr_q2_inv_a + b * b * bp1sq / a * tr_q2) / tr2;
  v.a_tilde = a * tr_q2 / tr2;
  v.b_tilde = 4.0 * a * b * tr_q2_inv_a / tr2;
  v.diagonal_case = true;
  return v;
}

}  // namespace waveinfer
