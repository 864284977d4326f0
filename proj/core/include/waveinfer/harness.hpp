#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "waveinfer/covariance.hpp"
#include "waveinfer/estimate.hpp"
#include "waveinfer/model.hpp"
#include "waveinfer/normality.hpp"
#include "waveinfer/simulate.hpp"

namespace waveinfer {

enum class EstimatorId : std::size_t { AHat = 0, BHat = 1, ATilde = 2, BTilde = 3 };

inline constexpr std::array<EstimatorId, 4> kAllEstimators = {
    EstimatorId::AHat, EstimatorId::BHat, EstimatorId::ATilde, EstimatorId::BTilde};

std::string_view to_string(EstimatorId id);

struct ReplicationSample {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  /// a_hat, b_hat, a_tilde, b_tilde; nullopt marks an undefined estimate.
  std::array<std::optional<double>, 4> values;
  double I_T = 0.0;
  double Y_T = 0.0;
  double H_T = 0.0;

  std::optional<double> value(EstimatorId id) const { return values[static_cast<std::size_t>(id)]; }
  friend bool operator==(const ReplicationSample&, const ReplicationSample&) = default;
};

struct EstimatorSummary {
  double truth = 0.0;
  std::size_t used = 0;      ///< samples with a defined estimate
  std::size_t excluded = 0;  ///< undefined estimates left out of every statistic
  double mean = 0.0;
  /// Sample variance (n - 1 denominator) of sqrt(T)(estimate - truth).
  double variance_scaled = 0.0;
  std::optional<double> var_theoretical;
  double rel_err_max = 0.0;
  /// 75th percentile of |estimate - truth| / truth (nearest rank).
  double rel_err_typical = 0.0;
  std::optional<NormalityResult> normality;  ///< Shapiro-Wilk on sqrt(T)(estimate - truth)

  friend bool operator==(const EstimatorSummary&, const EstimatorSummary&) = default;
};

using SummaryTable = std::array<EstimatorSummary, 4>;

struct McConfig {
  double T = 100.0;
  double dt = 0.001;
  Scheme scheme = Scheme::Euler;
  std::size_t replications = 100;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

/// Echo of the model a report was produced from.
struct ModelEcho {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> kappa;
  std::vector<std::vector<double>> q_matrix;
  ModeState x0;

  static ModelEcho of(const Model& model);
  Model to_model() const;
  friend bool operator==(const ModelEcho&, const ModelEcho&) = default;
};

struct McReport {
  McConfig config;
  ModelEcho model;
  std::vector<ReplicationSample> samples;
  SummaryTable summary;
};

/// M independent seeded paths (replication i uses replication_seed(master, i)),
/// estimated with the true a and b as the known other parameter for the hat
/// family. The report is identical for every worker count.
/// Throws ConfigError for M < 2; rethrows the failure of the lowest failing
/// replication (the message names its seed).
McReport run_monte_carlo(const Model& model, const McConfig& config);

/// Per-estimator statistics. Undefined estimates are excluded and counted.
/// Throws UsageError for an empty sample list.
SummaryTable summarize(std::span<const ReplicationSample> samples, double true_a, double true_b,
                       double T, const Model& model);

ReplicationSample make_sample(std::size_t index, std::uint64_t seed, const EstimateSet& estimates);

}  // namespace waveinfer
