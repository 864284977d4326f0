#include "waveinfer/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "waveinfer/errors.hpp"

namespace waveinfer {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 17> kKnownKeys = {
    "a", "b", "N", "preset", "kappa", "lambda", "lambda_scale", "lambda_exponent", "q", "x0",
    "dt", "T", "seed", "scheme", "reps", "workers", "record_every"};

double number(const json& v, std::string_view key) {
  if (!v.is_number()) throw ConfigError(fmt::format("'{}' must be a number", key));
  return v.get<double>();
}

std::uint64_t count(const json& v, std::string_view key) {
  if (!v.is_number_unsigned())
    throw ConfigError(fmt::format("'{}' must be a non-negative integer", key));
  return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json& v, std::string_view key) {
  if (!v.is_array()) throw ConfigError(fmt::format("'{}' must be an array of numbers", key));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(number(e, key));
  return out;
}

}  // namespace

ConfigFile parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw ConfigError(fmt::format("unknown config key '{}'", key));
  }

  ConfigFile cfg;
  auto& m = cfg.model;
  if (doc.contains("a")) m.a = number(doc["a"], "a");
  if (doc.contains("b")) m.b = number(doc["b"], "b");
  if (doc.contains("N")) {
    if (!doc["N"].is_number_integer()) throw ConfigError("'N' must be an integer");
    m.modes = doc["N"].get<int>();
  }
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("'preset' must be a string");
    m.preset = parse_preset_kind(doc["preset"].get<std::string>());
  }
  if (doc.contains("kappa")) m.kappa = number_list(doc["kappa"], "kappa");
  if (m.preset && m.kappa) throw ConfigError("give either 'preset' or 'kappa', not both");
  if (doc.contains("lambda")) m.lambda = number_list(doc["lambda"], "lambda");
  if (doc.contains("lambda_scale") || doc.contains("lambda_exponent")) {
    LambdaRule rule;
    if (doc.contains("lambda_scale")) rule.scale = number(doc["lambda_scale"], "lambda_scale");
    if (doc.contains("lambda_exponent")) rule.exponent = number(doc["lambda_exponent"], "lambda_exponent");
    m.lambda_rule = rule;
  }
  if (doc.contains("q")) {
    const auto& q = doc["q"];
    if (!q.is_array()) throw ConfigError("'q' must be an array of rows");
    const auto n = static_cast<Eigen::Index>(q.size());
    Eigen::MatrixXd mat(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = number_list(q[static_cast<std::size_t>(i)], "q");
      if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("'q' must be square");
      for (Eigen::Index j = 0; j < n; ++j) mat(i, j) = row[static_cast<std::size_t>(j)];
    }
    m.q = std::move(mat);
  }
  const int noise_sources = int(m.lambda.has_value()) + int(m.lambda_rule.has_value()) + int(m.q.has_value());
  if (noise_sources > 1) throw ConfigError("give at most one of 'lambda', 'q', 'lambda_scale'/'lambda_exponent'");
  if (doc.contains("x0")) {
    const auto& x0 = doc["x0"];
    if (!x0.is_array()) throw ConfigError("'x0' must be an array of [u, v] pairs");
    ModeState state;
    for (const auto& p : x0) {
      const auto pair = number_list(p, "x0");
      if (pair.size() != 2) throw ConfigError("'x0' entries must be [u, v] pairs");
      state.push_back({pair[0], pair[1]});
    }
    m.x0 = std::move(state);
  }

  auto& r = cfg.run;
  if (doc.contains("dt")) r.dt = number(doc["dt"], "dt");
  if (doc.contains("T")) r.T = number(doc["T"], "T");
  if (doc.contains("seed")) r.seed = count(doc["seed"], "seed");
  if (doc.contains("scheme")) {
    if (!doc["scheme"].is_string()) throw ConfigError("'scheme' must be a string");
    r.scheme = parse_scheme(doc["scheme"].get<std::string>());
  }
  if (doc.contains("reps")) r.reps = count(doc["reps"], "reps");
  if (doc.contains("workers")) r.workers = count(doc["workers"], "workers");
  if (doc.contains("record_every")) r.record_every = count(doc["record_every"], "record_every");
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed config '{}': {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

Model build_model(const ModelSpec& spec) {
  if (!spec.a || !spec.b) throw ConfigError("model needs both 'a' and 'b'");
  if (spec.preset && spec.kappa) throw ConfigError("give either a preset or an explicit kappa list, not both");
  if (!spec.preset && !spec.kappa) throw ConfigError("model needs a preset or an explicit kappa list");

  std::vector<double> kappa;
  if (spec.preset) {
    if (!spec.modes) throw ConfigError("preset model needs 'N'");
    const Model base = builtin_preset(*spec.preset, *spec.modes, *spec.a, *spec.b,
                                      spec.lambda_rule.value_or(LambdaRule{}));
    if (!spec.lambda && !spec.q && !spec.x0) return base;
    kappa.assign(base.kappa().begin(), base.kappa().end());
  } else {
    kappa = *spec.kappa;
    if (spec.modes && *spec.modes != static_cast<int>(kappa.size()))
      throw ConfigError(fmt::format("'N' = {} does not match {} kappa entries", *spec.modes, kappa.size()));
  }
  if (kappa.empty()) throw ConfigError("model needs at least one mode");
  const auto n = static_cast<Eigen::Index>(kappa.size());

  Eigen::MatrixXd q;
  if (spec.q) {
    q = *spec.q;
  } else if (spec.lambda) {
    if (static_cast<Eigen::Index>(spec.lambda->size()) != n)
      throw ConfigError(fmt::format("'lambda' has {} entries, expected {}", spec.lambda->size(), n));
    q = Eigen::VectorXd::Map(spec.lambda->data(), n).asDiagonal();
  } else {
    const LambdaRule rule = spec.lambda_rule.value_or(LambdaRule{});
    q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) q(i, i) = rule.scale / std::pow(double(i + 1), rule.exponent);
  }
  ModeState x0 = spec.x0.value_or(ModeState(kappa.size(), ModePair{1.0, 1.0}));
  return Model(*spec.a, *spec.b, std::move(kappa), std::move(q), std::move(x0));
}

}  // namespace waveinfer
