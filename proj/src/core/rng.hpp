#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rpnb {

// Deterministic random source. std::mt19937_64 has a fully specified output
// sequence, and the samplers below are hand-rolled so that streams do not
// depend on the standard library's distribution implementations. Given the
// same seed, the same draw sequence is produced on every platform (normal()
// is bit-exact per libm build; transcendental calls may differ in the last
// ulp between libm implementations).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; draws two uniforms per pair and caches
  // the second value.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    // 1 - u1 lies in (0, 1], so the log is finite.
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, bound) by rejection; unbiased for any bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rpnb
