#include "waveinfer/rng.hpp"

#include <cmath>

namespace waveinfer {

GaussianStream::GaussianStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double GaussianStream::uniform_symmetric() {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double x;
  double y;
  double s;
  do {
    x = uniform_symmetric();
    y = uniform_symmetric();
    s = x * x + y * y;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = y * f;
  has_spare_ = true;
  return x * f;
}

}  // namespace waveinfer
