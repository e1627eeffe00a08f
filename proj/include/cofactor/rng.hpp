#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cofactor {

// Deterministic draw helpers over mt19937_64.  The standard distribution
// objects are implementation-defined, which would break the bit-identical
// replication contract across toolchains, so the mappings are pinned here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (polar-free, cached spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, bound) by 128-bit multiply-shift.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const auto wide =
        static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(bound);
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace cofactor
