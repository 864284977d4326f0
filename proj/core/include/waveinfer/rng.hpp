#pragma once

#include <cstdint>
#include <random>

namespace waveinfer {

// Seeding and Gaussian sampling are pinned so that a seed reproduces the same
// path on every platform and build of this library:
//
//   engine      std::mt19937_64, seeded with splitmix64(seed)
//   uniforms    (engine() >> 11) * 2^-53, mapped to (-1, 1)
//   normals     Marsaglia polar method; the second variate of each accepted
//               pair is cached and returned by the next call
//   streams     replication i of a Monte Carlo run uses
//               replication_seed(master, i) = splitmix64(master ^ splitmix64(i + 1))

/// One step of the splitmix64 generator (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 1));
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);

  /// Standard normal variate.
  double next();

 private:
  double uniform_symmetric();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace waveinfer
