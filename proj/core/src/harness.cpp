#include "waveinfer/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "waveinfer/errors.hpp"
#include "waveinfer/rng.hpp"

namespace waveinfer {

std::string_view to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::AHat: return "a_hat";
    case EstimatorId::BHat: return "b_hat";
    case EstimatorId::ATilde: return "a_tilde";
    case EstimatorId::BTilde: return "b_tilde";
  }
  return "unknown";
}

ModelEcho ModelEcho::of(const Model& model) {
  ModelEcho e;
  e.a = model.a();
  e.b = model.b();
  e.kappa.assign(model.kappa().begin(), model.kappa().end());
  const auto& q = model.q_matrix();
  e.q_matrix.resize(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j) e.q_matrix[static_cast<std::size_t>(i)].push_back(q(i, j));
  e.x0 = model.x0();
  return e;
}

Model ModelEcho::to_model() const {
  const auto n = static_cast<Eigen::Index>(q_matrix.size());
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = q_matrix[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("q matrix echo is not square");
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) = row[static_cast<std::size_t>(j)];
  }
  return Model(a, b, kappa, std::move(q), x0);
}

ReplicationSample make_sample(std::size_t index, std::uint64_t seed, const EstimateSet& est) {
  ReplicationSample s;
  s.index = index;
  s.seed = seed;
  s.values = {est.a_hat.get(), est.b_hat.get(), est.a_tilde.get(), est.b_tilde.get()};
  s.I_T = est.I_T;
  s.Y_T = est.Y_T;
  s.H_T = est.H_T;
  return s;
}

McReport run_monte_carlo(const Model& model, const McConfig& config) {
  if (config.replications < 2) throw ConfigError("Monte Carlo needs at least 2 replications");
  const std::size_t m = config.replications;
  const double tr = trace_q(model);
  std::vector<ReplicationSample> samples(m);
  std::vector<std::exception_ptr> errors(m);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < m; i = next.fetch_add(1)) {
      const std::uint64_t seed = replication_seed(config.master_seed, i);
      try {
        const auto path = simulate_path(model, config.scheme, config.dt, config.T, seed);
        samples[i] = make_sample(i, seed, estimate_all(path.stats, tr, model.a(), model.b()));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, m);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  McReport report;
  report.config = config;
  report.model = ModelEcho::of(model);
  report.samples = std::move(samples);
  report.summary = summarize(report.samples, model.a(), model.b(), config.T, model);
  return report;
}

SummaryTable summarize(std::span<const ReplicationSample> samples, double true_a, double true_b,
                       double T, const Model& model) {
  if (samples.empty()) throw UsageError("summarize needs at least one sample");
  std::optional<AsymptoticVariances> theory;
  if (trace_q(model) > 0.0) theory = asymptotic_variances(model);

  SummaryTable table;
  const double root_t = std::sqrt(T);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (EstimatorId id : kAllEstimators) {
    auto& s = table[static_cast<std::size_t>(id)];
    const bool is_a = id == EstimatorId::AHat || id == EstimatorId::ATilde;
    s.truth = is_a ? true_a : true_b;
    if (theory) {
      switch (id) {
        case EstimatorId::AHat: s.var_theoretical = theory->a_hat; break;
        case EstimatorId::BHat: s.var_theoretical = theory->b_hat; break;
        case EstimatorId::ATilde: s.var_theoretical = theory->a_tilde; break;
        case EstimatorId::BTilde: s.var_theoretical = theory->b_tilde; break;
      }
    }

    std::vector<double> values;
    for (const auto& r : samples) {
      if (auto v = r.value(id))
        values.push_back(*v);
      else
        ++s.excluded;
    }
    s.used = values.size();
    if (values.empty()) {
      s.mean = s.variance_scaled = s.rel_err_max = s.rel_err_typical = nan;
      continue;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());

    std::vector<double> scaled(values.size());
    std::vector<double> rel(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      scaled[i] = root_t * (values[i] - s.truth);
      rel[i] = std::abs(values[i] - s.truth) / s.truth;
    }
    if (values.size() >= 2) {
      double mean_scaled = 0.0;
      for (double v : scaled) mean_scaled += v;
      mean_scaled /= static_cast<double>(scaled.size());
      double ss = 0.0;
      for (double v : scaled) ss += (v - mean_scaled) * (v - mean_scaled);
      s.variance_scaled = ss / static_cast<double>(scaled.size() - 1);
    } else {
      s.variance_scaled = nan;
    }
    std::sort(rel.begin(), rel.end());
    s.rel_err_max = rel.back();
    const auto rank = static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(rel.size())));
    s.rel_err_typical = rel[std::max<std::size_t>(rank, 1) - 1];

    if (scaled.size() >= 3 && scaled.size() <= 5000) {
      try {
        s.normality = normality_test(scaled);
      } catch (const DomainError&) {
        // identical values: no normality statistic
      }
    }
  }
  return table;
}

}  // namespace waveinfer
