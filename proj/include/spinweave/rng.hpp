#pragma once

#include <cmath>
#include <cstdint>

namespace spinweave {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Steele, Lea & Flood / Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Derives a child stream key from a parent key and a tag. Chaining
// derive_stream calls gives statistically independent streams for nested
// indices (cube, generation, probe, ...) without any shared mutable state,
// so parallel and serial evaluation orders see identical draws.
inline std::uint64_t derive_stream(std::uint64_t key, std::uint64_t tag) {
  return mix64(key ^ mix64((tag + 1) * kGoldenGamma));
}

// Deterministic counter-based random stream (splitmix64 sequence).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  // Uniform on [-sqrt(3), sqrt(3)]: zero mean, unit variance.
  double next_symmetric_unit_variance() {
    constexpr double sqrt3 = 1.7320508075688772;
    return sqrt3 * (2.0 * next_unit() - 1.0);
  }

  // Standard normal via Box-Muller; consumes two draws.
  double next_gaussian() {
    constexpr double two_pi = 6.283185307179586;
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;  // (0, 1]
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace spinweave
