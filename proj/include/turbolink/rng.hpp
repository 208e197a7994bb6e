#pragma once

#include <complex>
#include <cstdint>

namespace turbolink {

// Counter-based seed split: derives independent stream seeds from a master
// seed so that any block of a Monte Carlo run is reproducible in isolation.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

// Small deterministic generator (splitmix64 core). Bit-identical output on
// every platform, unlike std::uniform_*_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // uniform in [0, 1)
  double uniform();

  // uniform integer in [0, n), n > 0
  std::uint64_t uniform_int(std::uint64_t n);

  // standard normal, Box-Muller
  double gaussian();

  // circular complex Gaussian, unit variance (0.5 per component)
  std::complex<double> cgaussian();

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace turbolink
