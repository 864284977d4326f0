#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "waveinfer/covariance.hpp"
#include "waveinfer/estimate.hpp"
#include "waveinfer/harness.hpp"
#include "waveinfer/simulate.hpp"

namespace waveinfer {

/// Text written for an undefined estimate in CSV output.
inline constexpr std::string_view kUndefinedCell = "NA";

nlohmann::json to_json(const PathStatistics& stats);
nlohmann::json to_json(const EstimateSet& estimates);
nlohmann::json to_json(const TraceSplit& split);
nlohmann::json to_json(const AsymptoticVariances& variances);
nlohmann::json to_json(const McConfig& config);
nlohmann::json to_json(const ModelEcho& model);
nlohmann::json to_json(const ReplicationSample& sample);
nlohmann::json to_json(const EstimatorSummary& summary);
nlohmann::json to_json(const McReport& report);

/// Inverse of to_json(McReport). Throws ConfigError on malformed input.
McReport mc_report_from_json(const nlohmann::json& doc);

/// Header: time,I_t,Y_t,H_t,a_hat_t,b_hat_t,a_tilde_t,b_tilde_t.
void write_trajectory_csv(std::ostream& out, std::span<const TimedEstimates> rows,
                          std::span<const TrajectorySample> samples);

/// Header: seed,a_hat,b_hat,a_tilde,b_tilde,I_T,Y_T,H_T.
void write_samples_csv(std::ostream& out, std::span<const ReplicationSample> samples);

/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace waveinfer
