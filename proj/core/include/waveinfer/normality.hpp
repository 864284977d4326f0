#pragma once

#include <cstddef>
#include <span>

namespace waveinfer {

struct NormalityResult {
  double W = 0.0;  ///< Shapiro-Wilk statistic
  double p = 0.0;  ///< approximate p-value under the normal null
  std::size_t n = 0;

  friend bool operator==(const NormalityResult&, const NormalityResult&) = default;
};

// Shapiro-Wilk test, Royston's 1995 algorithm (Applied Statistics AS R94):
//
//   coefficients  m_i = Phi^{-1}((i - 3/8) / (n + 1/4)); the two extreme
//                 weights come from polynomials in 1/sqrt(n)
//                   c1 = {0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056}
//                   c2 = {0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633}
//                 and the remaining ones are -m_i / sqrt(normaliser)
//   p, n == 3     exact: 6/pi (asin(sqrt(W)) - pi/3)
//   p, 4..11      y = -log(gamma - log(1 - W)), gamma = -2.273 + 0.459 n,
//                 mean {0.544, -0.39978, 0.025054, -6.714e-4} (in n),
//                 log sd {1.3822, -0.77857, 0.062767, -0.0020322} (in n)
//   p, 12..5000   y = log(1 - W), mean {-1.5861, -0.31082, -0.083751, 0.0038915}
//                 and log sd {-0.4803, -0.082676, 0.0030302} (in log n)
//
// followed by the upper normal tail of (y - mean) / sd.
//
// Throws UnsupportedError for n outside [3, 5000] and DomainError when all
// values are identical.
NormalityResult normality_test(std::span<const double> samples);

}  // namespace waveinfer
