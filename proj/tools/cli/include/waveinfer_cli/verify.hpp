#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <waveinfer/model.hpp>

namespace waveinfer::cli {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      ///< worst observed error (suite-specific measure)
  double tolerance = 0.0;
  std::size_t cases = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
};

/// mode_propagator against expm_oracle on 300 generated (a, b, kappa, t) points
/// (oscillatory, overdamped and |b kappa - a^2| <= 1e-9) plus every mode of
/// `model` at several times. Error is max entrywise difference over max(1, |expm|).
SuiteResult verify_semigroup(const Model& model, std::uint64_t seed, double tolerance = 1e-10);

/// q_infinity_apply against the quadrature oracle on random non-diagonal models
/// with N <= 4 and on `model` itself; relative error in the energy norm.
SuiteResult verify_q_infinity(const Model& model, std::uint64_t seed, double tolerance = 1e-6);

/// <R x, M x>_V identities on 100 random states per mode of `model` and on
/// random (a, b, kappa); error relative to |R x|_V |M x|_V.
SuiteResult verify_lyapunov(const Model& model, std::uint64_t seed, double tolerance = 1e-10);

/// Mean signed Ito-representation defects over seeded Euler paths at dt and
/// dt/2 (batches of 16 seeds until each mean has standard error below 5%,
/// at most 512); each of R, R1, R2 must shrink by a factor in [1.6, 2.5].
SuiteResult verify_ito(const Model& model, std::uint64_t seed);

VerifyReport run_verify(const Model& model, std::uint64_t seed);

}  // namespace waveinfer::cli
