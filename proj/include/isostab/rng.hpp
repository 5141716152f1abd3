#pragma once

// Counter-based deterministic random streams.  A stream is a pure function of
// (key, counter), so samples can be drawn from any index in any order and from
// any thread without shared state.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace isostab::rng {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Named substream derivation: hashes `name` (FNV-1a) into the seed.
inline std::uint64_t derive(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return mix64(seed ^ h);
}

struct Stream {
  std::uint64_t key = 0;

  /// Uniform on (0, 1]; never zero, so logarithms are safe.
  double u01(std::uint64_t ctr) const {
    const std::uint64_t bits = mix64(key ^ mix64(ctr + 0x632be59bd9b4e019ull));
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on (-1, 1].
  double sym(std::uint64_t ctr) const { return 2.0 * u01(ctr) - 1.0; }

  /// Standard normal via Box-Muller; consumes counters 2*ctr and 2*ctr+1.
  double gauss(std::uint64_t ctr) const {
    const double u1 = u01(2 * ctr);
    const double u2 = u01(2 * ctr + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586477 * u2);
  }
};

}  // namespace isostab::rng
