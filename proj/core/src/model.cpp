#include "waveinfer/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "waveinfer/errors.hpp"
#include "waveinfer/semigroup.hpp"

namespace waveinfer {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Oscillatory: return "oscillatory";
    case Regime::Overdamped: return "overdamped";
    case Regime::Critical: return "critical";
  }
  return "unknown";
}

std::string_view to_string(PresetKind kind) {
  return kind == PresetKind::Wave ? "wave" : "plate";
}

PresetKind parse_preset_kind(std::string_view text) {
  if (text == "wave") return PresetKind::Wave;
  if (text == "plate") return PresetKind::Plate;
  throw ConfigError(fmt::format("unknown preset '{}' (expected wave|plate)", text));
}

double LambdaRule::operator()(std::size_t n) const {
  return scale / std::pow(static_cast<double>(n), exponent);
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

Model::Model(double a, double b, std::vector<double> kappa, Eigen::MatrixXd q_matrix,
             ModeState x0)
    : a_(a), b_(b), kappa_(std::move(kappa)), q_(std::move(q_matrix)), x0_(std::move(x0)) {
  if (!positive_finite(a_)) throw ConfigError(fmt::format("a must be positive, got {}", a_));
  if (!positive_finite(b_)) throw ConfigError(fmt::format("b must be positive, got {}", b_));
  const auto n = kappa_.size();
  if (n == 0) throw ConfigError("model needs at least one mode");
  for (std::size_t i = 0; i < n; ++i) {
    if (!positive_finite(kappa_[i]))
      throw ConfigError(fmt::format("kappa[{}] must be positive, got {}", i, kappa_[i]));
    if (i > 0 && !(kappa_[i] > kappa_[i - 1]))
      throw ConfigError(fmt::format("kappa must be strictly increasing (kappa[{}] = {} <= {})", i,
                                    kappa_[i], kappa_[i - 1]));
  }
  const auto ni = static_cast<Eigen::Index>(n);
  if (q_.rows() != ni || q_.cols() != ni)
    throw ConfigError(fmt::format("q matrix must be {}x{}, got {}x{}", n, n, q_.rows(), q_.cols()));
  if (!q_.allFinite()) throw ConfigError("q matrix has non-finite entries");

  const double scale = std::max(1.0, q_.cwiseAbs().maxCoeff());
  const double asym = (q_ - q_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw ConfigError(fmt::format("q matrix is not symmetric (max |q - q^T| = {})", asym));
  q_ = 0.5 * (q_ + q_.transpose());

  const double trace = q_.trace();
  if (q_.diagonal().minCoeff() < 0.0 || trace < 0.0)
    throw ConfigError("q matrix has negative diagonal entries");
  if (n > 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * trace)
      throw ConfigError(fmt::format("q matrix is not positive semidefinite (min eigenvalue {})",
                                    eig.eigenvalues().minCoeff()));
  }
  diagonal_ = (q_ - Eigen::MatrixXd(q_.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;

  if (x0_.size() != n)
    throw ConfigError(fmt::format("x0 has {} modes, expected {}", x0_.size(), n));
  for (const auto& p : x0_)
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) throw ConfigError("x0 has non-finite entries");
}

Regime Model::regime(std::size_t n, double tol) const { return classify_mode(a_, b_, kappa(n), tol); }

Model Model::with_parameters(double a, double b) const { return Model(a, b, kappa_, q_, x0_); }

Model Model::with_q_matrix(Eigen::MatrixXd q_matrix) const {
  return Model(a_, b_, kappa_, std::move(q_matrix), x0_);
}

Model Model::with_x0(ModeState x0) const { return Model(a_, b_, kappa_, q_, std::move(x0)); }

Model builtin_preset(PresetKind kind, int modes, double a, double b, const LambdaRule& rule) {
  if (modes < 1) throw ConfigError(fmt::format("number of modes must be >= 1, got {}", modes));
  if (!positive_finite(a) || !positive_finite(b))
    throw ConfigError(fmt::format("a and b must be positive, got a={} b={}", a, b));
  const auto n = static_cast<std::size_t>(modes);
  std::vector<double> kappa(n);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(modes, modes);
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    const double alpha = k * k * pi2;
    kappa[i] = kind == PresetKind::Wave ? alpha : alpha * alpha;
    q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = rule(i + 1);
  }
  return Model(a, b, std::move(kappa), std::move(q), ModeState(n, ModePair{1.0, 1.0}));
}

double trace_q(const Model& model) { return model.q_matrix().trace(); }

}  // namespace waveinfer
