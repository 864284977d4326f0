#include "waveinfer/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "waveinfer/errors.hpp"

namespace waveinfer {
namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }

json estimate_json(const Estimate& e) {
  if (e.defined()) return number_or_null(e.value());
  return json{{"undefined", std::string(to_string(*e.reason()))}};
}

double read_number(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ConfigError("expected a number in report");
  return v.get<double>();
}

std::optional<double> read_optional(const json& v) {
  if (v.is_null()) return std::nullopt;
  return read_number(v);
}

std::string cell(double v) { return fmt::format("{}", v); }

std::string cell(const std::optional<double>& v) {
  return v ? cell(*v) : std::string(kUndefinedCell);
}

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ConfigError(fmt::format("report is missing '{}'", key));
  return doc.at(key);
}

}  // namespace

json to_json(const PathStatistics& s) {
  json out{{"I_T", s.I_T}, {"Y_T", s.Y_T}, {"H_T", s.H_T}, {"T", s.T}, {"dt", s.dt},
           {"steps", s.steps}, {"scheme", std::string(to_string(s.scheme))}, {"seed", s.seed}};
  json state = json::array();
  for (const auto& p : s.final_state) state.push_back({p.u, p.v});
  out["final_state"] = std::move(state);
  if (s.ito) out["ito"] = json{{"R", s.ito->r}, {"R1", s.ito->r1}, {"R2", s.ito->r2}};
  return out;
}

json to_json(const EstimateSet& e) {
  return json{{"a_hat", estimate_json(e.a_hat)},     {"b_hat", estimate_json(e.b_hat)},
              {"a_tilde", estimate_json(e.a_tilde)}, {"b_tilde", estimate_json(e.b_tilde)},
              {"I_T", e.I_T},                        {"Y_T", e.Y_T},
              {"H_T", e.H_T},                        {"tr_q", e.tr_q},
              {"known_a", optional_number(e.known_a)}, {"known_b", optional_number(e.known_b)}};
}

json to_json(const TraceSplit& s) {
  return json{{"total", s.total}, {"position", s.position}, {"velocity", s.velocity}};
}

json to_json(const AsymptoticVariances& v) {
  return json{{"a_hat", v.a_hat},     {"b_hat", v.b_hat},     {"a_tilde", v.a_tilde},
              {"b_tilde", v.b_tilde}, {"diagonal_case", v.diagonal_case}};
}

json to_json(const McConfig& c) {
  return json{{"T", c.T},
              {"dt", c.dt},
              {"scheme", std::string(to_string(c.scheme))},
              {"M", c.replications},
              {"master_seed", c.master_seed},
              {"workers", c.workers}};
}

json to_json(const ModelEcho& m) {
  json x0 = json::array();
  for (const auto& p : m.x0) x0.push_back({p.u, p.v});
  return json{{"a", m.a}, {"b", m.b}, {"kappa", m.kappa}, {"q", m.q_matrix}, {"x0", std::move(x0)}};
}

json to_json(const ReplicationSample& s) {
  json out{{"index", s.index}, {"seed", s.seed}};
  for (EstimatorId id : kAllEstimators) out[std::string(to_string(id))] = optional_number(s.value(id));
  out["I_T"] = s.I_T;
  out["Y_T"] = s.Y_T;
  out["H_T"] = s.H_T;
  return out;
}

json to_json(const EstimatorSummary& s) {
  json out{{"truth", s.truth},
           {"used", s.used},
           {"excluded", s.excluded},
           {"mean", number_or_null(s.mean)},
           {"variance_scaled", number_or_null(s.variance_scaled)},
           {"var_theoretical", optional_number(s.var_theoretical)},
           {"rel_err_max", number_or_null(s.rel_err_max)},
           {"rel_err_typical", number_or_null(s.rel_err_typical)}};
  if (s.normality)
    out["shapiro_wilk"] = json{{"W", s.normality->W}, {"p", s.normality->p}, {"n", s.normality->n}};
  else
    out["shapiro_wilk"] = nullptr;
  return out;
}

json to_json(const McReport& r) {
  json summary = json::object();
  for (EstimatorId id : kAllEstimators)
    summary[std::string(to_string(id))] = to_json(r.summary[static_cast<std::size_t>(id)]);
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back(to_json(s));
  return json{{"config", to_json(r.config)},
              {"model", to_json(r.model)},
              {"summary", std::move(summary)},
              {"samples", std::move(samples)}};
}

McReport mc_report_from_json(const json& doc) {
  try {
    McReport r;
    const auto& c = field(doc, "config");
    r.config.T = field(c, "T").get<double>();
    r.config.dt = field(c, "dt").get<double>();
    r.config.scheme = parse_scheme(field(c, "scheme").get<std::string>());
    r.config.replications = field(c, "M").get<std::size_t>();
    r.config.master_seed = field(c, "master_seed").get<std::uint64_t>();
    r.config.workers = field(c, "workers").get<std::size_t>();

    const auto& m = field(doc, "model");
    r.model.a = field(m, "a").get<double>();
    r.model.b = field(m, "b").get<double>();
    r.model.kappa = field(m, "kappa").get<std::vector<double>>();
    r.model.q_matrix = field(m, "q").get<std::vector<std::vector<double>>>();
    for (const auto& p : field(m, "x0")) r.model.x0.push_back({p.at(0).get<double>(), p.at(1).get<double>()});

    for (const auto& s : field(doc, "samples")) {
      ReplicationSample sample;
      sample.index = field(s, "index").get<std::size_t>();
      sample.seed = field(s, "seed").get<std::uint64_t>();
      for (EstimatorId id : kAllEstimators)
        sample.values[static_cast<std::size_t>(id)] = read_optional(field(s, std::string(to_string(id)).c_str()));
      sample.I_T = read_number(field(s, "I_T"));
      sample.Y_T = read_number(field(s, "Y_T"));
      sample.H_T = read_number(field(s, "H_T"));
      r.samples.push_back(sample);
    }

    const auto& summary = field(doc, "summary");
    for (EstimatorId id : kAllEstimators) {
      const auto& j = field(summary, std::string(to_string(id)).c_str());
      auto& s = r.summary[static_cast<std::size_t>(id)];
      s.truth = read_number(field(j, "truth"));
      s.used = field(j, "used").get<std::size_t>();
      s.excluded = field(j, "excluded").get<std::size_t>();
      s.mean = read_number(field(j, "mean"));
      s.variance_scaled = read_number(field(j, "variance_scaled"));
      s.var_theoretical = read_optional(field(j, "var_theoretical"));
      s.rel_err_max = read_number(field(j, "rel_err_max"));
      s.rel_err_typical = read_number(field(j, "rel_err_typical"));
      const auto& sw = field(j, "shapiro_wilk");
      if (!sw.is_null())
        s.normality = NormalityResult{field(sw, "W").get<double>(), field(sw, "p").get<double>(),
                                      field(sw, "n").get<std::size_t>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed Monte Carlo report: {}", e.what()));
  }
}

void write_trajectory_csv(std::ostream& out, std::span<const TimedEstimates> rows,
                          std::span<const TrajectorySample> samples) {
  if (rows.size() != samples.size()) throw ShapeError("trajectory and estimate streams differ in length");
  out << "time,I_t,Y_t,H_t,a_hat_t,b_hat_t,a_tilde_t,b_tilde_t\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = samples[i];
    const auto& e = rows[i].estimates;
    out << cell(s.time) << ',' << cell(s.I_t) << ',' << cell(s.Y_t) << ',' << cell(s.H_t) << ','
        << cell(e.a_hat.get()) << ',' << cell(e.b_hat.get()) << ',' << cell(e.a_tilde.get()) << ','
        << cell(e.b_tilde.get()) << '\n';
  }
}

void write_samples_csv(std::ostream& out, std::span<const ReplicationSample> samples) {
  out << "seed,a_hat,b_hat,a_tilde,b_tilde,I_T,Y_T,H_T\n";
  for (const auto& s : samples) {
    out << s.seed;
    for (EstimatorId id : kAllEstimators) out << ',' << cell(s.value(id));
    out << ',' << cell(s.I_T) << ',' << cell(s.Y_T) << ',' << cell(s.H_T) << '\n';
  }
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace waveinfer
