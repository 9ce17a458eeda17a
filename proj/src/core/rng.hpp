#pragma once

#include <cstdint>
#include <random>

namespace sfrd {

// Mixer from the splitmix64 generator; used to derive independent per-item
// seeds from a corpus seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic RNG over mt19937_64. Uniform draws are derived with fixed bit
// manipulation instead of std::uniform_real_distribution, whose algorithm is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive bounds. Modulo bias is irrelevant at the ranges used here.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine_() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sfrd
