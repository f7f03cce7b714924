#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace surfcell {

// Seeded RNG with hand-rolled distributions. std::mt19937_64 output is
// standard-specified, but the library distributions are not; sampling from
// raw bits keeps artifacts byte-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // U[0,1) with 53-bit resolution.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one value per call, spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  double exponential() {
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Derive an independent stream (per trial / per task) from a master seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 mix of (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace surfcell
