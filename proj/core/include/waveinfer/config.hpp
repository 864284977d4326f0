#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "waveinfer/model.hpp"
#include "waveinfer/simulate.hpp"

namespace waveinfer {

/// Model part of a config file. Keys:
///   a, b            true parameters (required to build a model)
///   preset          "wave" | "plate", together with N
///   N               number of modes (checked against kappa when both given)
///   kappa           explicit eigenvalue list (mutually exclusive with preset)
///   lambda          diagonal noise spectrum, one entry per mode
///   lambda_scale    lambda_n = lambda_scale / n^lambda_exponent (defaults 1000, 2)
///   lambda_exponent
///   q               full N x N noise covariance (rows)
///   x0              initial state as [[u, v], ...]; defaults to (1, 1) per mode
/// At most one of lambda, q, lambda_scale/lambda_exponent is allowed.
struct ModelSpec {
  std::optional<double> a;
  std::optional<double> b;
  std::optional<int> modes;
  std::optional<PresetKind> preset;
  std::optional<std::vector<double>> kappa;
  std::optional<std::vector<double>> lambda;
  std::optional<LambdaRule> lambda_rule;
  std::optional<Eigen::MatrixXd> q;
  std::optional<ModeState> x0;
};

/// Run part of a config file. Keys: dt, T, seed, scheme ("euler" | "exact"),
/// reps, workers, record_every (trajectory decimation in steps).
struct RunSettings {
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<std::uint64_t> seed;
  std::optional<Scheme> scheme;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> record_every;
};

struct ConfigFile {
  ModelSpec model;
  RunSettings run;
};

/// Strict parse: unknown keys, wrong types and conflicting model sources throw ConfigError.
ConfigFile parse_config(const nlohmann::json& doc);
ConfigFile load_config(const std::filesystem::path& path);

/// Throws ConfigError when the spec is incomplete or ambiguous; model
/// validation errors propagate unchanged.
Model build_model(const ModelSpec& spec);

}  // namespace waveinfer
