#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <waveinfer/config.hpp>
#include <waveinfer/model.hpp>
#include <waveinfer/simulate.hpp>

namespace waveinfer::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2, kVerifyFailed = 3 };

/// Values given on the command line; they override the config file.
struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> preset;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<int> modes;
  std::optional<double> T;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> scheme;
  std::filesystem::path out = ".";
  bool plots = false;
};

struct RunConfig {
  ModelSpec model;
  double T = 100.0;
  double dt = 0.001;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::Euler;
  std::size_t reps = 100;
  std::size_t workers = 1;
  std::optional<std::size_t> record_every;
  std::filesystem::path out = ".";
  bool plots = false;
};

/// Config file (if any), then command-line overrides, then `threads_env`
/// (the WAVEINFER_THREADS value) for the worker count. Without a model source
/// the wave preset with a = 1, b = 0.2, N = 10 is used.
RunConfig resolve_run_config(const Overrides& overrides, const char* threads_env);

/// Trajectory decimation in steps: record_every if set, otherwise 100.
std::size_t decimation_for(const RunConfig& config);

int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_estimate(const RunConfig& config, std::ostream& out);
int cmd_variances(const RunConfig& config, std::ostream& out);
int cmd_montecarlo(const RunConfig& config, std::ostream& out);
int cmd_verify(const RunConfig& config, std::ostream& out);

/// Full command-line entry point; maps library errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace waveinfer::cli
