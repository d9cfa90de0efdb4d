#ifndef PLANESDF_RANDOM_HPP
#define PLANESDF_RANDOM_HPP

// Deterministic sampling helpers. std:: distributions are implementation
// defined, so anything that must be bit-reproducible draws through these.

#include <cmath>
#include <cstdint>
#include <random>

namespace planesdf {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ull + b));
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Bounded integer in [0, n) via 128-bit multiply; bias is < 2^-64.
inline uint64_t uniform_index(std::mt19937_64& rng, uint64_t n) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Standard normal via Box-Muller, consuming exactly two engine draws.
inline double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0,1], keeps log finite
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

// Normal truncated at +-3 sigma by clamping. The hard bound makes
// noise-inflated bounding boxes exact.
inline double truncated_gaussian(std::mt19937_64& rng, double sigma) {
  const double g = gaussian(rng);
  return sigma * std::clamp(g, -3.0, 3.0);
}

}  // namespace planesdf

#endif  // PLANESDF_RANDOM_HPP
