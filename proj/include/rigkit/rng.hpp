#pragma once

#include <cstdint>
#include <random>

namespace rigkit {

// Seeded generator with fully specified output. Only raw mt19937_64 draws
// are used (std::uniform_*_distribution is implementation-defined), so the
// same seed gives the same sequence on every platform and stdlib.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next() { return gen_(); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform index in [0, n); n must be positive.
  size_t index(size_t n) { return static_cast<size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rigkit
