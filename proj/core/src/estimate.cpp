#include "waveinfer/estimate.hpp"

#include <cmath>

#include "waveinfer/errors.hpp"

namespace waveinfer {

std::string_view to_string(Undefined reason) {
  switch (reason) {
    case Undefined::MissingKnownParameter: return "missing_known_parameter";
    case Undefined::NonPositiveStatistic: return "non_positive_statistic";
    case Undefined::NonPositiveTrace: return "non_positive_trace";
    case Undefined::NonPositiveDenominator: return "non_positive_denominator";
  }
  return "unknown";
}

double Estimate::value() const {
  if (!defined()) throw UsageError("estimate is undefined: " + std::string(to_string(*reason_)));
  return value_;
}

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

EstimateSet estimate_hat(double I_T, double tr_q, std::optional<double> known_a,
                         std::optional<double> known_b) {
  EstimateSet out;
  out.I_T = I_T;
  out.tr_q = tr_q;
  out.known_a = known_a;
  out.known_b = known_b;

  const auto fail = [&](Undefined r) {
    if (known_b) out.a_hat = Estimate::undefined(r);
    if (known_a) out.b_hat = Estimate::undefined(r);
  };
  if (!positive(tr_q)) {
    fail(Undefined::NonPositiveTrace);
    return out;
  }
  if (!positive(I_T)) {
    fail(Undefined::NonPositiveStatistic);
    return out;
  }
  if (known_b) {
    const double b = *known_b;
    out.a_hat = Estimate::of((b + 1.0) * tr_q / (4.0 * b * I_T));
  }
  if (known_a) {
    const double denom = 4.0 * *known_a * I_T - tr_q;
    out.b_hat = denom > 0.0 ? Estimate::of(tr_q / denom)
                            : Estimate::undefined(Undefined::NonPositiveDenominator);
  }
  return out;
}

EstimateSet estimate_tilde(double Y_T, double H_T, double tr_q) {
  EstimateSet out;
  out.Y_T = Y_T;
  out.H_T = H_T;
  out.tr_q = tr_q;
  if (!positive(tr_q))
    out.a_tilde = Estimate::undefined(Undefined::NonPositiveTrace);
  else if (!positive(H_T))
    out.a_tilde = Estimate::undefined(Undefined::NonPositiveStatistic);
  else
    out.a_tilde = Estimate::of(tr_q / (4.0 * H_T));

  if (positive(Y_T) && positive(H_T))
    out.b_tilde = Estimate::of(H_T / Y_T);
  else
    out.b_tilde = Estimate::undefined(Undefined::NonPositiveStatistic);
  return out;
}

EstimateSet estimate_all(double I_T, double Y_T, double H_T, double tr_q,
                         std::optional<double> known_a, std::optional<double> known_b) {
  EstimateSet out = estimate_hat(I_T, tr_q, known_a, known_b);
  const EstimateSet tilde = estimate_tilde(Y_T, H_T, tr_q);
  out.a_tilde = tilde.a_tilde;
  out.b_tilde = tilde.b_tilde;
  out.Y_T = Y_T;
  out.H_T = H_T;
  return out;
}

EstimateSet estimate_all(const PathStatistics& stats, double tr_q, std::optional<double> known_a,
                         std::optional<double> known_b) {
  return estimate_all(stats.I_T, stats.Y_T, stats.H_T, tr_q, known_a, known_b);
}

std::vector<TimedEstimates> running_estimates(std::span<const TrajectorySample> stream, double tr_q,
                                              std::optional<double> known_a,
                                              std::optional<double> known_b) {
  if (stream.empty()) throw UsageError("running_estimates needs a non-empty sample stream");
  std::vector<TimedEstimates> out;
  out.reserve(stream.size());
  double last = -INFINITY;
  for (const auto& s : stream) {
    if (!(s.time > last) && !out.empty())
      throw DomainError("trajectory time stamps must be strictly increasing");
    last = s.time;
    out.push_back({s.time, estimate_all(s.I_t, s.Y_t, s.H_t, tr_q, known_a, known_b)});
  }
  return out;
}

}  // namespace waveinfer
