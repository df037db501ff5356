#pragma once

#include <cstdint>

namespace ehdec {

// Counter-based generator: every draw is a pure function of its key, so Monte
// Carlo statistics do not depend on execution order.
enum class DrawPurpose : std::uint64_t { fading = 1, arrival = 2, termination = 3 };

struct CounterRng {
  std::uint64_t seed = 0;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    // SplitMix64 finalizer.
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t run, std::uint64_t slot, std::uint64_t node,
                               DrawPurpose purpose) const {
    std::uint64_t h = mix(seed);
    h = mix(h ^ run);
    h = mix(h ^ slot);
    h = mix(h ^ node);
    return mix(h ^ static_cast<std::uint64_t>(purpose));
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t run, std::uint64_t slot, std::uint64_t node,
                           DrawPurpose purpose) const {
    return static_cast<double>(bits(run, slot, node, purpose) >> 11) * 0x1.0p-53;
  }
};

}  // namespace ehdec
