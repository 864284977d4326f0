#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <waveinfer/config.hpp>
#include <waveinfer/errors.hpp>
#include <waveinfer/io.hpp>

#include "oracles.hpp"

using namespace waveinfer;
using nlohmann::json;

TEST(Config, PresetDefaults) {
  const auto cfg = parse_config(json::parse(R"({"a": 1, "b": 0.2, "preset": "wave", "N": 10})"));
  const Model m = build_model(cfg.model);
  EXPECT_EQ(m.modes(), 10u);
  EXPECT_NEAR(trace_q(m), 1549.7677, 1e-4);
  EXPECT_DOUBLE_EQ(m.kappa(3), oracle::reference_model().kappa(3));
}

TEST(Config, ExplicitSpectrumAndRunSettings) {
  const auto cfg = parse_config(json::parse(R"({
    "a": 0.5, "b": 2, "kappa": [1, 4, 9], "lambda": [3, 2, 1],
    "x0": [[0, 1], [1, 0], [0.5, 0.5]],
    "dt": 0.01, "T": 20, "seed": 12, "scheme": "exact", "reps": 50, "workers": 3, "record_every": 10})"));
  const Model m = build_model(cfg.model);
  EXPECT_EQ(m.kappa(2), 9.0);
  EXPECT_EQ(m.lambda(0), 3.0);
  EXPECT_EQ(m.x0()[2].u, 0.5);
  EXPECT_EQ(*cfg.run.dt, 0.01);
  EXPECT_EQ(*cfg.run.T, 20.0);
  EXPECT_EQ(*cfg.run.seed, 12u);
  EXPECT_EQ(*cfg.run.scheme, Scheme::Exact);
  EXPECT_EQ(*cfg.run.reps, 50u);
  EXPECT_EQ(*cfg.run.workers, 3u);
  EXPECT_EQ(*cfg.run.record_every, 10u);
}

TEST(Config, FullQMatrixAndLambdaRule) {
  const Model m = build_model(
      parse_config(json::parse(R"({"a": 1, "b": 1, "kappa": [1, 2], "q": [[2, 0.5], [0.5, 1]]})")).model);
  EXPECT_FALSE(m.q_is_diagonal());
  EXPECT_EQ(m.q_matrix()(0, 1), 0.5);
  const Model r = build_model(parse_config(json::parse(
      R"({"a": 1, "b": 1, "preset": "plate", "N": 3, "lambda_scale": 1, "lambda_exponent": 2})")).model);
  EXPECT_DOUBLE_EQ(r.lambda(1), 0.25);
}

TEST(Config, StrictRejections) {
  const char* bad[] = {
      R"({"a": 1, "b": 1, "preset": "wave", "N": 2, "colour": 3})",
      R"({"a": 1, "b": 1, "preset": "wave", "kappa": [1]})",
      R"({"a": 1, "b": 1, "kappa": [1], "lambda": [1], "q": [[1]]})",
      R"({"a": "one", "b": 1, "preset": "wave", "N": 2})",
      R"({"a": 1, "b": 1, "preset": "wave", "N": 2.5})",
      R"({"a": 1, "b": 1, "kappa": [1, 2], "x0": [[1, 2, 3], [1, 1]]})",
      R"({"a": 1, "b": 1, "preset": "wave", "N": 2, "seed": -1})",
      R"({"a": 1, "b": 1, "preset": "wave", "N": 2, "scheme": "rk4"})",
      R"([1, 2])",
  };
  for (const char* text : bad) EXPECT_THROW(parse_config(json::parse(text)), ConfigError) << text;
}

TEST(Config, BuildRejections) {
  const auto build = [](const char* text) { return build_model(parse_config(json::parse(text)).model); };
  EXPECT_THROW(build(R"({"b": 1, "preset": "wave", "N": 2})"), ConfigError);
  EXPECT_THROW(build(R"({"a": 1, "b": 1})"), ConfigError);
  EXPECT_THROW(build(R"({"a": 1, "b": 1, "kappa": [1, 2], "N": 3})"), ConfigError);
  EXPECT_THROW(build(R"({"a": 1, "b": 1, "kappa": [-1, 2]})"), ConfigError);
  EXPECT_THROW(build(R"({"a": 1, "b": 1, "kappa": [1, 2], "lambda": [1]})"), ConfigError);
}

TEST(Config, FileErrors) {
  EXPECT_THROW(load_config("/nonexistent/waveinfer.json"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "waveinfer_bad_config.json";
  std::ofstream(path) << "{\"a\": 1,";
  EXPECT_THROW(load_config(path), ConfigError);
  std::filesystem::remove(path);
}

TEST(Io, McReportRoundTrip) {
  McReport r;
  r.config = McConfig{100.0, 0.001, Scheme::Euler, 3, 42, 4};
  r.model = ModelEcho::of(oracle::reference_model());
  for (std::size_t i = 0; i < 3; ++i) {
    ReplicationSample s;
    s.index = i;
    s.seed = 1000 + i;
    s.values = {0.9994 + 0.1 * i, 0.2003, 0.9948 / 3.0, std::nullopt};
    s.I_T = 2324.652 + i;
    s.Y_T = 1937.210;
    s.H_T = 387.442 + 1e-13;
    r.samples.push_back(s);
  }
  r.summary = summarize(r.samples, 1.0, 0.2, 100.0, oracle::reference_model());
  r.summary[0].normality = NormalityResult{0.98, 0.58, 3};

  const std::string text = dump_json(to_json(r));
  const McReport back = mc_report_from_json(json::parse(text));
  EXPECT_EQ(back.samples, r.samples);
  EXPECT_EQ(back.model, r.model);
  EXPECT_EQ(back.config.master_seed, 42u);
  EXPECT_EQ(back.summary[0], r.summary[0]);
  EXPECT_EQ(back.summary[3].used, 0u);
  EXPECT_TRUE(std::isnan(back.summary[3].mean));
  EXPECT_EQ(dump_json(to_json(back)), text);
  EXPECT_THROW(mc_report_from_json(json::parse(R"({"config": {}})")), ConfigError);
}

TEST(Io, SamplesCsv) {
  ReplicationSample s;
  s.seed = 7;
  s.values = {1.5, std::nullopt, 0.25, 0.125};
  s.I_T = 3;
  s.Y_T = 2;
  s.H_T = 1;
  std::ostringstream out;
  write_samples_csv(out, std::vector<ReplicationSample>{s});
  EXPECT_EQ(out.str(), "seed,a_hat,b_hat,a_tilde,b_tilde,I_T,Y_T,H_T\n7,1.5,NA,0.25,0.125,3,2,1\n");
}

TEST(Io, TrajectoryCsv) {
  std::vector<TrajectorySample> t{{0.0, 2.0, 1.0, 1.0}, {0.5, 2.0, 1.5, 0.5}};
  const auto rows = running_estimates(t, 1.0, 1.0, 1.0);
  std::ostringstream out;
  write_trajectory_csv(out, rows, t);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "time,I_t,Y_t,H_t,a_hat_t,b_hat_t,a_tilde_t,b_tilde_t");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "0,2,1,1,0.25,0.14285714285714285,0.25,1");
  EXPECT_THROW(write_trajectory_csv(out, rows, std::vector<TrajectorySample>{t[0]}), ShapeError);
}

TEST(Io, PathStatisticsJson) {
  const Model m = oracle::reference_model();
  const auto p = simulate_path(m, Scheme::Euler, 0.01, 1.0, 3, RecordOptions{true, 0});
  const json j = to_json(p.stats);
  EXPECT_EQ(j.at("I_T").get<double>(), p.stats.I_T);
  EXPECT_EQ(j.at("steps").get<std::size_t>(), 100u);
  EXPECT_EQ(j.at("scheme").get<std::string>(), "euler");
  EXPECT_EQ(j.at("final_state").size(), 10u);
  EXPECT_TRUE(j.contains("ito"));
  const json e = to_json(estimate_hat(100.0, 1000.0, 1.0, 0.2));
  EXPECT_EQ(e.at("b_hat").at("undefined").get<std::string>(), to_string(Undefined::NonPositiveDenominator));
}
