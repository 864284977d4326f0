#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "waveinfer/simulate.hpp"

namespace waveinfer {

/// Why an estimator has no value.
enum class Undefined {
  MissingKnownParameter,   ///< hat family needs the other parameter
  NonPositiveStatistic,    ///< I_T, Y_T or H_T is not > 0
  NonPositiveTrace,        ///< Tr Q is not > 0
  NonPositiveDenominator,  ///< b_hat pole: 4 a I_T <= Tr Q
};

std::string_view to_string(Undefined reason);

/// A single estimator value or an explicit "undefined" marker.
class Estimate {
 public:
  static Estimate of(double value) { return Estimate(value); }
  static Estimate undefined(Undefined reason) { return Estimate(reason); }

  bool defined() const noexcept { return !reason_.has_value(); }
  explicit operator bool() const noexcept { return defined(); }
  /// Throws UsageError when undefined.
  double value() const;
  std::optional<double> get() const noexcept {
    return defined() ? std::optional<double>(value_) : std::nullopt;
  }
  std::optional<Undefined> reason() const noexcept { return reason_; }

  friend bool operator==(const Estimate&, const Estimate&) = default;

 private:
  explicit Estimate(double v) : value_(v) {}
  explicit Estimate(Undefined r) : reason_(r) {}

  double value_ = 0.0;
  std::optional<Undefined> reason_;
};

struct EstimateSet {
  Estimate a_hat = Estimate::undefined(Undefined::MissingKnownParameter);
  Estimate b_hat = Estimate::undefined(Undefined::MissingKnownParameter);
  Estimate a_tilde = Estimate::undefined(Undefined::NonPositiveStatistic);
  Estimate b_tilde = Estimate::undefined(Undefined::NonPositiveStatistic);

  double I_T = 0.0;
  double Y_T = 0.0;
  double H_T = 0.0;
  double tr_q = 0.0;
  std::optional<double> known_a;
  std::optional<double> known_b;
};

/// a_hat = (b+1) Tr Q / (4 b I_T) needs known_b; b_hat = Tr Q / (4 a I_T - Tr Q) needs known_a.
/// Only a_hat/b_hat (and the echoed inputs) are filled.
EstimateSet estimate_hat(double I_T, double tr_q, std::optional<double> known_a,
                         std::optional<double> known_b);

/// a_tilde = Tr Q / (4 H_T); b_tilde = H_T / Y_T. Only the tilde entries are filled.
EstimateSet estimate_tilde(double Y_T, double H_T, double tr_q);

/// Both families from one set of path statistics.
EstimateSet estimate_all(double I_T, double Y_T, double H_T, double tr_q,
                         std::optional<double> known_a, std::optional<double> known_b);

EstimateSet estimate_all(const PathStatistics& stats, double tr_q, std::optional<double> known_a,
                         std::optional<double> known_b);

struct TimedEstimates {
  double time = 0.0;
  EstimateSet estimates;
};

/// One EstimateSet per trajectory sample. Throws UsageError for an empty
/// stream, DomainError for non-monotone time stamps.
std::vector<TimedEstimates> running_estimates(std::span<const TrajectorySample> stream, double tr_q,
                                              std::optional<double> known_a,
                                              std::optional<double> known_b);

}  // namespace waveinfer
