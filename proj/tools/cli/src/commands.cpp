#include "waveinfer_cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <waveinfer/covariance.hpp>
#include <waveinfer/errors.hpp>
#include <waveinfer/estimate.hpp>
#include <waveinfer/harness.hpp>
#include <waveinfer/io.hpp>

#include "waveinfer_cli/svg.hpp"
#include "waveinfer_cli/verify.hpp"

namespace waveinfer::cli {
namespace {

using nlohmann::json;

std::filesystem::path prepare_out(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec || !std::filesystem::is_directory(config.out))
    throw ConfigError(fmt::format("cannot create output directory '{}'", config.out.string()));
  return config.out;
}

std::string format_estimate(const Estimate& e) {
  if (e.defined()) return fmt::format("{:.6f}", e.value());
  return fmt::format("undefined ({})", to_string(*e.reason()));
}

void print_estimates(std::ostream& out, const EstimateSet& e) {
  out << fmt::format("I_T = {:.6f}  Y_T = {:.6f}  H_T = {:.6f}\n", e.I_T, e.Y_T, e.H_T);
  out << "a_hat   = " << format_estimate(e.a_hat) << '\n'
      << "b_hat   = " << format_estimate(e.b_hat) << '\n'
      << "a_tilde = " << format_estimate(e.a_tilde) << '\n'
      << "b_tilde = " << format_estimate(e.b_tilde) << '\n';
}

std::size_t parse_threads(const char* text) {
  std::size_t value = 0;
  std::size_t used = 0;
  try {
    value = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || text[used] != '\0' || value == 0)
    throw ConfigError(fmt::format("WAVEINFER_THREADS must be a positive integer, got '{}'", text));
  return value;
}

Chart estimate_chart(std::string title, std::string y_label, double truth,
                     const std::vector<TrajectorySample>& samples, const std::vector<TimedEstimates>& rows,
                     bool a_family) {
  Chart chart;
  chart.title = std::move(title);
  chart.x_label = "t";
  chart.y_label = std::move(y_label);
  chart.reference_y = {truth};
  Series hat{a_family ? "a_hat" : "b_hat", {}, {}, false};
  Series tilde{a_family ? "a_tilde" : "b_tilde", {}, {}, false};
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& e = rows[i].estimates;
    hat.x.push_back(samples[i].time);
    tilde.x.push_back(samples[i].time);
    hat.y.push_back((a_family ? e.a_hat : e.b_hat).get().value_or(nan));
    tilde.y.push_back((a_family ? e.a_tilde : e.b_tilde).get().value_or(nan));
  }
  chart.series = {std::move(hat), std::move(tilde)};
  return chart;
}

struct SimulationRun {
  Model model;
  PathResult path;
  double tr_q;
};

SimulationRun simulate(const RunConfig& config, std::size_t decimation) {
  Model model = build_model(config.model);
  PathResult path = simulate_path(model, config.scheme, config.dt, config.T, config.seed, RecordOptions{false, decimation});
  const double tr = trace_q(model);
  return {std::move(model), std::move(path), tr};
}

}  // namespace

RunConfig resolve_run_config(const Overrides& o, const char* threads_env) {
  RunConfig rc;
  if (o.config) {
    const ConfigFile file = load_config(*o.config);
    rc.model = file.model;
    if (file.run.T) rc.T = *file.run.T;
    if (file.run.dt) rc.dt = *file.run.dt;
    if (file.run.seed) rc.seed = *file.run.seed;
    if (file.run.scheme) rc.scheme = *file.run.scheme;
    if (file.run.reps) rc.reps = *file.run.reps;
    if (file.run.workers) rc.workers = *file.run.workers;
    rc.record_every = file.run.record_every;
  }
  auto& m = rc.model;
  if (o.preset) {
    if (m.kappa) throw ConfigError("--preset conflicts with the explicit kappa list in the config file");
    m.preset = parse_preset_kind(*o.preset);
  }
  if (o.a) m.a = *o.a;
  if (o.b) m.b = *o.b;
  if (o.modes) m.modes = *o.modes;
  if (!m.preset && !m.kappa) {
    m.preset = PresetKind::Wave;
    if (!m.modes) m.modes = 10;
  }
  if (m.preset && !m.modes) m.modes = 10;
  if (!m.a) m.a = 1.0;
  if (!m.b) m.b = 0.2;

  if (o.T) rc.T = *o.T;
  if (o.dt) rc.dt = *o.dt;
  if (o.seed) rc.seed = *o.seed;
  if (o.reps) rc.reps = *o.reps;
  if (o.scheme) rc.scheme = parse_scheme(*o.scheme);
  if (threads_env && *threads_env) rc.workers = parse_threads(threads_env);
  if (rc.workers == 0) throw ConfigError("worker count must be positive");
  rc.out = o.out;
  rc.plots = o.plots;
  return rc;
}

std::size_t decimation_for(const RunConfig& config) {
  if (config.record_every) {
    if (*config.record_every == 0) throw ConfigError("record_every must be positive");
    return *config.record_every;
  }
  return 100;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const auto run = simulate(config, decimation_for(config));
  const auto rows = running_estimates(run.path.trajectory, run.tr_q, run.model.a(), run.model.b());

  std::ostringstream csv;
  write_trajectory_csv(csv, rows, run.path.trajectory);
  write_text_file(dir / "trajectory.csv", csv.str());
  write_text_file(dir / "path_stats.json", dump_json(to_json(run.path.stats)));
  if (config.plots) {
    write_text_file(dir / "estimates_a.svg",
                    render_svg(estimate_chart("Running estimates of a", "a", run.model.a(), run.path.trajectory, rows, true)));
    write_text_file(dir / "estimates_b.svg",
                    render_svg(estimate_chart("Running estimates of b", "b", run.model.b(), run.path.trajectory, rows, false)));
  }
  out << fmt::format("simulated {} steps (T = {}, dt = {}, scheme {}, seed {})\n", run.path.stats.steps, config.T,
                     config.dt, to_string(config.scheme), config.seed);
  print_estimates(out, rows.back().estimates);
  out << "wrote " << (dir / "trajectory.csv").string() << " (" << rows.size() << " rows)\n";
  return kOk;
}

int cmd_estimate(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const auto run = simulate(config, 0);
  const auto est = estimate_all(run.path.stats, run.tr_q, run.model.a(), run.model.b());
  write_text_file(dir / "estimates.json",
                  dump_json(json{{"path_stats", to_json(run.path.stats)}, {"estimates", to_json(est)}}));
  print_estimates(out, est);
  return kOk;
}

int cmd_variances(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const Model model = build_model(config.model);
  const auto split = trace_q_infinity(model);
  const auto var = asymptotic_variances(model);
  write_text_file(dir / "variances.json",
                  dump_json(json{{"trace_q", trace_q(model)},
                                 {"trace_q_infinity", to_json(split)},
                                 {"asymptotic_variances", to_json(var)}}));
  out << fmt::format("Tr Q_inf = {:.6f}  (position {:.6f}, velocity {:.6f})\n", split.total, split.position,
                     split.velocity);
  out << fmt::format("Var a_hat = {:.6f}  Var b_hat = {:.6f}  Var a_tilde = {:.6f}  Var b_tilde = {:.6f}\n", var.a_hat,
                     var.b_hat, var.a_tilde, var.b_tilde);
  if (!var.diagonal_case) out << "note: Q is not diagonal; the variance formulas are not validated for this case\n";
  return kOk;
}

int cmd_montecarlo(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const Model model = build_model(config.model);
  McConfig mc;
  mc.T = config.T;
  mc.dt = config.dt;
  mc.scheme = config.scheme;
  mc.replications = config.reps;
  mc.master_seed = config.seed;
  mc.workers = config.workers;
  const McReport report = run_monte_carlo(model, mc);

  write_text_file(dir / "mc_report.json", dump_json(to_json(report)));
  std::ostringstream csv;
  write_samples_csv(csv, report.samples);
  write_text_file(dir / "samples.csv", csv.str());

  out << fmt::format("{} replications, T = {}, dt = {}, master seed {}\n", mc.replications, mc.T, mc.dt, mc.master_seed);
  out << fmt::format("{:<8} {:>10} {:>12} {:>12} {:>10} {:>9}\n", "", "mean", "var", "var theory", "SW p", "excluded");
  for (EstimatorId id : kAllEstimators) {
    const auto& s = report.summary[static_cast<std::size_t>(id)];
    out << fmt::format("{:<8} {:>10.4f} {:>12.4f} {:>12.4f} {:>10.3f} {:>9}\n", to_string(id), s.mean,
                       s.variance_scaled, s.var_theoretical.value_or(std::nan("")),
                       s.normality ? s.normality->p : std::nan(""), s.excluded);
    if (config.plots) {
      std::vector<double> scaled;
      for (const auto& r : report.samples)
        if (auto v = r.value(id)) scaled.push_back(std::sqrt(mc.T) * (*v - s.truth));
      write_text_file(dir / fmt::format("qq_{}.svg", to_string(id)),
                      render_svg(qq_chart(fmt::format("Normal Q-Q plot of sqrt(T)({} - truth)", to_string(id)), scaled)));
    }
  }
  return kOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const Model model = build_model(config.model);
  const VerifyReport report = run_verify(model, config.seed);
  json suites = json::array();
  for (const auto& s : report.suites) {
    out << fmt::format("{} {}: worst {:.3e} (tolerance {:.1e}, {} cases) {}\n", s.passed ? "PASS" : "FAIL", s.name,
                       s.worst, s.tolerance, s.cases, s.detail);
    suites.push_back(json{{"name", s.name},
                          {"passed", s.passed},
                          {"worst", s.worst},
                          {"tolerance", s.tolerance},
                          {"cases", s.cases},
                          {"detail", s.detail}});
  }
  write_text_file(dir / "verify.json", dump_json(json{{"passed", report.passed()}, {"suites", std::move(suites)}}));
  return report.passed() ? kOk : kVerifyFailed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parameter estimation for damped stochastic wave equations"};
  app.require_subcommand(1);
  Overrides o;
  std::string config_path;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option_function<std::string>("--preset", [&](const std::string& v) { o.preset = v; }, "wave|plate");
    sub->add_option_function<double>("--a", [&](double v) { o.a = v; }, "damping parameter a");
    sub->add_option_function<double>("--b", [&](double v) { o.b = v; }, "stiffness parameter b");
    sub->add_option_function<int>("--modes", [&](int v) { o.modes = v; }, "number of modes N");
    sub->add_option_function<double>("--T", [&](double v) { o.T = v; }, "time horizon");
    sub->add_option_function<double>("--dt", [&](double v) { o.dt = v; }, "time step");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { o.seed = v; }, "seed (master seed for montecarlo)");
    sub->add_option_function<std::size_t>("--reps", [&](std::size_t v) { o.reps = v; }, "Monte Carlo replications");
    sub->add_option_function<std::string>("--scheme", [&](const std::string& v) { o.scheme = v; }, "euler|exact");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--plots", o.plots, "write SVG plots");
  };
  auto* sim = app.add_subcommand("simulate", "simulate one path, write trajectory.csv and path_stats.json");
  auto* est = app.add_subcommand("estimate", "simulate one path and write estimates.json");
  auto* var = app.add_subcommand("variances", "trace of Q_inf and asymptotic variances");
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo study, write mc_report.json and samples.csv");
  auto* ver = app.add_subcommand("verify", "run the oracle suites");
  for (auto* s : {sim, est, var, mc, ver}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? kOk : kConfigError;
  }
  if (!config_path.empty()) o.config = config_path;

  try {
    const RunConfig rc = resolve_run_config(o, std::getenv("WAVEINFER_THREADS"));
    if (sim->parsed()) return cmd_simulate(rc, out);
    if (est->parsed()) return cmd_estimate(rc, out);
    if (var->parsed()) return cmd_variances(rc, out);
    if (mc->parsed()) return cmd_montecarlo(rc, out);
    return cmd_verify(rc, out);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace waveinfer::cli
