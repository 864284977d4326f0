#include "waveinfer/normality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "waveinfer/errors.hpp"

namespace waveinfer {

namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[] = {-2.273, 0.459};

// Half of the antisymmetric weight vector: weights[i] pairs x_(n-1-i) - x_(i).
std::vector<double> half_weights(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
    return a;
  }
  const boost::math::normal standard;
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = boost::math::quantile(standard, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

  std::size_t first;
  double fac;
  if (n > 5) {
    first = 2;
    const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                    (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    first = 1;
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

NormalityResult normality_test(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 3 || n > 5000)
    throw UnsupportedError(fmt::format("Shapiro-Wilk needs 3 <= n <= 5000, got {}", n));
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0.0)) throw DomainError("Shapiro-Wilk is undefined for identical values");

  const auto a = half_weights(n);
  double mean = 0.0;
  for (double v : x) mean += v / range;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) {
    const double d = v / range - mean;
    ss += d * d;
  }
  double num = 0.0;
  double asq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * (x[n - 1 - i] - x[i]) / range;
    asq += 2.0 * a[i] * a[i];
  }
  const double w = std::clamp(num * num / (asq * ss), 0.0, 1.0);

  NormalityResult out{w, 1.0, n};
  if (n == 3) {
    constexpr double pi6 = 6.0 / std::numbers::pi;
    constexpr double stqr = std::numbers::pi / 3.0;
    out.p = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    return out;
  }
  const double w1 = 1.0 - w;
  if (w1 <= 0.0) return out;
  double y = std::log(w1);
  const double an = static_cast<double>(n);
  double m;
  double s;
  if (n <= 11) {
    const double gamma = poly(kG, an);
    if (y >= gamma) {
      out.p = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    m = poly(kC3, an);
    s = std::exp(poly(kC4, an));
  } else {
    const double xx = std::log(an);
    m = poly(kC5, xx);
    s = std::exp(poly(kC6, xx));
  }
  out.p = boost::math::cdf(boost::math::complement(boost::math::normal(), (y - m) / s));
  return out;
}

}  // namespace waveinfer
